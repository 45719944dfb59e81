#pragma once

#include <vector>

#include "mri/array.hpp"
#include "mri/errors.hpp"

namespace mri {

/// Acquisition timing and weighting parameters.
struct SequenceParams {
  double tr = 3000.0;            // repetition time (ms)
  std::vector<double> te{80.0};  // echo time(s) (ms)
  double k_const = 1.0;          // global signal scale
  double b = 0.0;                // diffusion weighting (s/mm^2)

  void validate() const {
    if (tr <= 0.0) throw ParameterError("SequenceParams: tr must be > 0");
    if (te.empty()) throw ParameterError("SequenceParams: at least one te required");
    for (double t : te) {
      if (t < 0.0) throw ParameterError("SequenceParams: te must be >= 0");
      if (t > tr) throw ParameterError("SequenceParams: te must be <= tr");
    }
    if (k_const <= 0.0) throw ParameterError("SequenceParams: k_const must be > 0");
    if (b < 0.0) throw ParameterError("SequenceParams: b must be >= 0");
  }
};

/// Pixelwise tissue parameter maps.
struct TissueMaps {
  RealArray rho;   // proton density, >= 0
  RealArray t1;    // longitudinal relaxation (ms), > 0
  RealArray t2;    // transverse relaxation (ms), > 0
  RealArray diff;  // diffusivity (mm^2/s), >= 0

  void validate() const {
    if (!rho.same_shape(t1) || !rho.same_shape(t2) || !rho.same_shape(diff))
      throw DimensionError("TissueMaps: all maps must share one shape");
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (rho[i] < 0.0) throw ParameterError("TissueMaps: rho must be >= 0");
      if (t1[i] <= 0.0 || t2[i] <= 0.0)
        throw ParameterError("TissueMaps: t1 and t2 must be > 0");
      if (diff[i] < 0.0) throw ParameterError("TissueMaps: diff must be >= 0");
      if (rho[i] > 0.0 && t2[i] > t1[i])
        throw ParameterError("TissueMaps: t2 must be <= t1 where rho > 0");
    }
  }
};

/// Simulated signal atoms over a T2 grid, one unit-norm row per atom.
struct Dictionary {
  RealArray atoms;              // [n_atoms, n_echo]
  std::vector<double> t2_grid;  // ms, one per atom
  std::vector<double> te_list;  // ms, one per echo

  int n_atoms() const { return atoms.shape(0); }
  int n_echo() const { return atoms.shape(1); }
};

/// Orthonormal temporal basis from the dictionary SVD.
struct SubspaceBasis {
  RealArray basis;               // [n_echo, K], orthonormal columns
  double energy_captured = 0.0;  // fraction of total squared singular values

  int n_echo() const { return basis.shape(0); }
  int k() const { return basis.shape(1); }
};

/// Spin-echo signal K * rho * (1 - exp(-TR/T1)) * exp(-TE/T2), evaluated at
/// the first (or only) echo time in params.
double spin_echo_signal(double rho, double t1, double t2, const SequenceParams& params);

/// Spin-echo signal attenuated by diffusion: multiply by exp(-b * D).
double diffusion_signal(double rho, double t1, double t2, double diff,
                        const SequenceParams& params);

/// Diffusion weighting from gradient parameters: (gamma*G*Delta)^2 * (Delta - delta/3).
double b_value(double gamma, double g_amp, double big_delta, double small_delta);

/// Mono-exponential decay atoms exp(-TE/T2) over a T2 grid, each normalized
/// to unit Euclidean norm.
Dictionary dict_generate(const std::vector<double>& t2_grid,
                         const std::vector<double>& te_list);

/// Top-k right singular vectors of the atom matrix.
SubspaceBasis svd_basis(const Dictionary& dict, int k);

}  // namespace mri
