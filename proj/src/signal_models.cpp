#include "mri/signal_models.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace mri {

double spin_echo_signal(double rho, double t1, double t2, const SequenceParams& params) {
  params.validate();
  if (t1 <= 0.0 || t2 <= 0.0)
    throw ParameterError("spin_echo_signal: t1 and t2 must be > 0");
  if (rho < 0.0) throw ParameterError("spin_echo_signal: rho must be >= 0");
  const double te = params.te.front();
  return params.k_const * rho * (1.0 - std::exp(-params.tr / t1)) * std::exp(-te / t2);
}

double diffusion_signal(double rho, double t1, double t2, double diff,
                        const SequenceParams& params) {
  if (params.b < 0.0) throw ParameterError("diffusion_signal: b must be >= 0");
  if (diff < 0.0) throw ParameterError("diffusion_signal: diff must be >= 0");
  return spin_echo_signal(rho, t1, t2, params) * std::exp(-params.b * diff);
}

double b_value(double gamma, double g_amp, double big_delta, double small_delta) {
  if (big_delta < 0.0 || small_delta < 0.0)
    throw ParameterError("b_value: durations must be >= 0");
  if (big_delta <= small_delta / 3.0)
    throw ParameterError("b_value: big_delta must exceed small_delta/3");
  const double phase = gamma * g_amp * big_delta;
  return phase * phase * (big_delta - small_delta / 3.0);
}

Dictionary dict_generate(const std::vector<double>& t2_grid,
                         const std::vector<double>& te_list) {
  if (t2_grid.size() < 2)
    throw ParameterError("dict_generate: at least two T2 values required");
  if (te_list.empty()) throw ParameterError("dict_generate: te_list must be nonempty");
  for (std::size_t i = 1; i < t2_grid.size(); ++i)
    if (t2_grid[i] <= t2_grid[i - 1])
      throw ParameterError("dict_generate: t2_grid must be strictly increasing");
  for (double t2 : t2_grid)
    if (t2 <= 0.0) throw ParameterError("dict_generate: T2 values must be > 0");
  for (double te : te_list)
    if (te < 0.0) throw ParameterError("dict_generate: te must be >= 0");

  const int na = static_cast<int>(t2_grid.size());
  const int ne = static_cast<int>(te_list.size());
  Dictionary dict;
  dict.atoms = RealArray({na, ne});
  dict.t2_grid = t2_grid;
  dict.te_list = te_list;
  for (int a = 0; a < na; ++a) {
    double norm_sq = 0.0;
    for (int e = 0; e < ne; ++e) {
      const double v = std::exp(-te_list[e] / t2_grid[a]);
      dict.atoms.at(a, e) = v;
      norm_sq += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (int e = 0; e < ne; ++e) dict.atoms.at(a, e) *= inv;
  }
  return dict;
}

SubspaceBasis svd_basis(const Dictionary& dict, int k) {
  const int na = dict.n_atoms(), ne = dict.n_echo();
  if (k < 1 || k > ne) throw ParameterError("svd_basis: k must be in [1, n_echo]");

  Eigen::MatrixXd atoms(na, ne);
  for (int a = 0; a < na; ++a)
    for (int e = 0; e < ne; ++e) atoms(a, e) = dict.atoms.at(a, e);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(atoms, Eigen::ComputeThinV);
  const Eigen::VectorXd& sig = svd.singularValues();
  double total = 0.0, kept = 0.0;
  for (int i = 0; i < sig.size(); ++i) {
    const double s2 = sig(i) * sig(i);
    total += s2;
    if (i < k) kept += s2;
  }

  SubspaceBasis basis;
  basis.basis = RealArray({ne, k});
  for (int e = 0; e < ne; ++e)
    for (int j = 0; j < k; ++j) basis.basis.at(e, j) = svd.matrixV()(e, j);
  basis.energy_captured = total > 0.0 ? kept / total : 1.0;
  return basis;
}

}  // namespace mri
