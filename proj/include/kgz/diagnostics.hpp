#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgz/evolution.hpp"
#include "kgz/spectral.hpp"
#include "kgz/state.hpp"

namespace kgz {

// Identities evaluated along trajectories, in 3D (d = 3):
//
//   I   = -2 <u_t, (x.grad + 3/2) u> - alpha^-2 <D^-1 n_t, D^-1 (x.grad + 2) n>
//   I'  = 2 K2(u) + ||n_t||^2_{Hdot^-1} / (2 alpha^2) + ||n - u^2||^2 / 2 - <n - u^2, u^2>
//   I1  = ||u||^2,   I1'' = 2 ||u_t||^2 - 2 K0(u) + 2 <n - u^2, u^2>
//   I2  = ||u||^2 + ||n - n0K||^2_{Hdot^-1} / (2 alpha^2)
//   I2' = 2 <u, u_t> + <n - n0K, n_t>_{Hdot^-1} / alpha^2
//
// Rates are always the closed forms above, never numerical derivatives.

struct VirialValue {
    double I = 0;
    double rate = 0;
};
VirialValue virial(const SystemState& s);

struct AuxI1 {
    double I1 = 0;
    double rhs = 0;
};
AuxI1 auxiliary_I1(const SystemState& s);

/// Low-frequency part n0K = P_{<= -K} n0 of the initial density.
struct LowFreqRef {
    int K = 0;
    RadialField n0K;
    double eps0 = 0;
};

/// 1e-3 (1 + ||n0||).
double default_eps_target(const RadialField& n0);

/// Smallest K >= 0 with ||P_{<= -K} n0|| <= eps_target. Throws std::invalid_argument
/// for eps_target outside (0, 0.01 (1 + ||n0||)] and std::runtime_error if no
/// K <= max_K reaches the target.
LowFreqRef prepare_lowfreq_reference(const RadialField& n0, double eps_target, int max_K = 64);

struct AuxI2 {
    double I2 = 0;
    double deriv = 0;
};
AuxI2 auxiliary_I2(const SystemState& s, const LowFreqRef& ref);

/// Virial localized by psi(r / Rc), Rc in (0, R/2].
double local_virial(const SystemState& s, double cutoff_radius);

struct VariationalReport {
    bool applicable = false;  ///< J(phi) + nu^2/4 <= JQ
    double J = 0, K0 = 0, K2 = 0, l4_squared = 0, nu = 0;
    /// Set when K0 >= 0 (resp. K2 >= 0): 4 K2 + nu^2 - sqrt(6) nu ||phi||_4^2.
    double margin_nonneg_i0 = std::numeric_limits<double>::quiet_NaN();
    double margin_nonneg_i2 = std::numeric_limits<double>::quiet_NaN();
    /// Set when K0 <= 0 (resp. K2 <= 0): -nu ||phi||_4^2 - K0.
    double margin_nonpos_i0 = std::numeric_limits<double>::quiet_NaN();
    double margin_nonpos_i2 = std::numeric_limits<double>::quiet_NaN();

    /// Smallest margin over the applicable branches (0 if none is set).
    double worst_margin() const;
};

VariationalReport variational_inequality_check(const RadialField& phi, double nu, double JQ);

/// Composite energy norm ||u||_{H1}^2 + ||u_t||^2 + ||n||^2 + ||n_t||_{Hdot^-1}^2, squared.
double energy_norm_squared(const SpectralState& s);

/// r_j = || U(-t_{j+1}) s_{j+1} - U(-t_j) s_j || in the energy norm.
std::vector<double> scattering_residual(std::span<const SystemState> trajectory);

/// Incremental form used while a run is in progress.
class ScatteringTracker {
public:
    /// Returns the residual against the previous sample (NaN for the first).
    double sample(const SpectralState& s);

private:
    std::vector<SpectralState> last_;
};

// ---------------------------------------------------------------------------
// First-order variables U = u - i <D>^{-1} u_t, N = n - i D^{-1} n_t / alpha.

struct FirstOrderForm {
    RadialField U_re, U_im, N_re, N_im;
};
FirstOrderForm to_first_order(const SystemState& s);
SystemState from_first_order(const FirstOrderForm& f, double alpha, double t = 0.0);

// ---------------------------------------------------------------------------
// Records and classification

struct DiagnosticsRecord {
    double t = 0;
    double E = 0;
    double J_of_u = 0;
    double K0 = 0;
    double K2 = 0;
    double I_virial = 0;
    double I_rate_analytic = 0;
    double I1 = 0;
    double I1_rhs = 0;
    double I2 = 0;
    double I2_deriv = 0;
    double L4_of_u = 0;
    double H1_of_u = 0;
    double energy_norm2 = 0;
    double scattering_residual = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> local_virial;
};

struct RecordContext {
    const LowFreqRef* lowfreq = nullptr;
    std::vector<double> local_radii;
};

DiagnosticsRecord compute_record(const SystemState& s, const RecordContext& ctx);

/// CSV header/row for a record; local virial columns are named I_R=<radius>.
std::string csv_header(const std::vector<double>& local_radii);
std::string csv_row(const DiagnosticsRecord& r);

struct RunRecord {
    std::vector<DiagnosticsRecord> records;
    std::vector<double> local_radii;
    Termination termination = Termination::Horizon;
    double t_end = 0;
    double peak_h1 = 0;
    double h1_reference = 0;
    bool blowup_confirmed = false;
    double initial_energy_norm = 0;
    double E0 = 0;
    double K0_initial = 0;
    double K2_initial = 0;
    int lowfreq_K = 0;
    double lowfreq_eps0 = 0;
    std::optional<SpectralState> final_state;
};

struct MonitorOptions {
    std::vector<double> local_radii;
    /// Records between scattering-residual samples; 0 disables sampling.
    std::size_t scattering_every = 0;
    /// eps target for n0K; NaN selects default_eps_target.
    double eps_target = std::numeric_limits<double>::quiet_NaN();
    /// Re-run with dt/2 when the run ends in blow-up.
    bool confirm_blowup = true;
    /// Called after each record is stored (checkpoint writers hook in here).
    Observer after_record;
};

/// evolve() with a diagnostics record at every observation.
RunRecord monitored_evolve(const SpectralState& s0, const EvolveConfig& cfg, const MonitorOptions& opts);
RunRecord monitored_evolve(const SystemState& s0, const EvolveConfig& cfg, const MonitorOptions& opts);

enum class Prediction { Scattering, Blowup, OutOfScope };
enum class Observation { Scattering, Blowup, Undetermined };
const char* to_string(Prediction p);
const char* to_string(Observation o);

struct Verdict {
    Prediction predicted = Prediction::OutOfScope;
    Observation observed = Observation::Undetermined;
    bool consistent = true;
    // evidence
    double energy_ratio = 0;  ///< E / J(Q)
    double final_residual = std::numeric_limits<double>::quiet_NaN();
    bool residual_tail_decreasing = false;
    bool blowup_confirmed = false;
    double kappa_hat = std::numeric_limits<double>::quiet_NaN();
    double i2_concavity_max = std::numeric_limits<double>::quiet_NaN();
};

/// Scattering proxy: the last 5 residual samples strictly decrease and the
/// final one is below 1e-2 of the initial energy norm.
bool scattering_proxy(const RunRecord& rec, double* final_residual = nullptr,
                      bool* tail_decreasing = nullptr);

Verdict classify_run(const RunRecord& rec, double JQ);

/// Centered second differences (f[j+1] - 2 f[j] + f[j-1]) / h^2 at interior points.
std::vector<double> second_differences(std::span<const double> f, double h);
/// Centered first differences (f[j+1] - f[j-1]) / (2h) at interior points.
std::vector<double> centered_differences(std::span<const double> f, double h);

/// Length of the leading run of records with |E - E0| <= drift_tol |E0|.
std::size_t resolved_prefix(const RunRecord& rec, double drift_tol = 1e-4);

/// Minimum second difference of I1 over the resolved window (the measured
/// convexity constant).
double measured_kappa(const RunRecord& rec);
/// Maximum second difference of I2^{-1/4} over the final quarter of the records.
double i2_concavity_tail(const RunRecord& rec);

struct SignReport {
    int flips_K0 = 0;
    int flips_K2 = 0;
    int mismatches = 0;  ///< records where K0, K2 both exceed tol with opposite signs
};
SignReport sign_persistence(const RunRecord& rec, double tol);

}  // namespace kgz
