#include "kgz/ground_state.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kgz/functionals.hpp"

namespace kgz {

namespace {

constexpr const char* kCacheTag = "kgz-groundstate v1";

struct OdeRhs {
    // y = (Q, Q')
    void operator()(double r, double q, double p, double& dq, double& dp) const {
        dq = p;
        dp = q - q * q * q - 2.0 * p / r;
    }
};

// Taylor expansion of the regular solution about r = 0 up to r^6.
void series_start(double a, double r, double& q, double& p) {
    const double c2 = (a - a * a * a) / 6.0;
    const double c4 = c2 * (1.0 - 3.0 * a * a) / 20.0;
    const double c6 = (c4 * (1.0 - 3.0 * a * a) - 3.0 * a * c2 * c2) / 42.0;
    const double r2 = r * r;
    q = a + r2 * (c2 + r2 * (c4 + r2 * c6));
    p = r * (2.0 * c2 + r2 * (4.0 * c4 + r2 * 6.0 * c6));
}

// w(r) for r > r_m: solves w'' = w with w(r_m) = w_m and w(R) = 0.
void stitch_tail(RadialField& q, std::size_t from) {
    const RadialGrid& g = q.grid;
    const double rm = g.node(from);
    const double wm = q.w[from];
    const double denom = std::sinh(g.radius() - rm);
    for (std::size_t i = from + 1; i < q.w.size(); ++i) {
        q.w[i] = wm * std::sinh(g.radius() - g.node(i)) / denom;
    }
}

std::size_t first_node_below(const RadialField& q, double level) {
    for (std::size_t i = 0; i < q.w.size(); ++i) {
        if (q.value(i) < level) return i;
    }
    return q.w.size();
}

// Fixed point of Q = M^{3/2} (1 - Lap)^{-1} Q^3 with M = <(1-Lap)Q,Q>/<Q^3,Q>.
void petviashvili_polish(RadialField& q, int max_iter = 400) {
    auto& tr = transform_for(q.grid);
    const RadialGrid& g = q.grid;
    SpectralField a = tr.forward(q);
    for (int it = 0; it < max_iter; ++it) {
        const RadialField cube = pointwise_product(q, pointwise_product(q, q));
        const SpectralField c = tr.forward(cube);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < a.a.size(); ++k) {
            const double xi = g.frequency(k);
            num += (1.0 + xi * xi) * a.a[k] * a.a[k];
            den += c.a[k] * a.a[k];
        }
        const double m = std::pow(num / den, 1.5);
        double change = 0.0, size = 0.0;
        for (std::size_t k = 0; k < a.a.size(); ++k) {
            const double xi = g.frequency(k);
            const double next = m * c.a[k] / (1.0 + xi * xi);
            change += (next - a.a[k]) * (next - a.a[k]);
            size += next * next;
            a.a[k] = next;
        }
        q = tr.inverse(a);
        if (change <= 1e-30 * size) break;
    }
}

double central_value(const RadialField& q) {
    auto& tr = transform_for(q.grid);
    const SpectralField a = tr.forward(q);
    std::vector<double> dw(q.grid.intervals() + 1);
    tr.derivative(a.a, q.grid.radius(), dw);
    return dw[0];
}

}  // namespace

const char* to_string(ShootOutcome o) {
    switch (o) {
        case ShootOutcome::Decay: return "Decay";
        case ShootOutcome::Crossed: return "Crossed";
        case ShootOutcome::Diverged: return "Diverged";
    }
    return "?";
}

ShootResult shoot_static_ode(double a, const RadialGrid& grid, int substeps) {
    if (!(a > 0.0)) throw std::invalid_argument("shooting value a must be positive");
    if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");

    const std::size_t n = grid.intervals();
    ShootResult res;
    res.q.assign(n + 1, std::numeric_limits<double>::quiet_NaN());
    res.q[0] = a;

    // Resolve the core scale 1/a as well as the grid.
    const int m = std::max(substeps, static_cast<int>(std::ceil(grid.dr() * a / 0.05)));
    const double h = grid.dr() / m;
    const OdeRhs f;
    auto rk4 = [&](double& r, double& q, double& p) {
        double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
        f(r, q, p, k1q, k1p);
        f(r + 0.5 * h, q + 0.5 * h * k1q, p + 0.5 * h * k1p, k2q, k2p);
        f(r + 0.5 * h, q + 0.5 * h * k2q, p + 0.5 * h * k2p, k3q, k3p);
        f(r + h, q + h * k3q, p + h * k3p, k4q, k4p);
        q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
        p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        r += h;
    };

    double r = h;
    double q = 0.0, p = 0.0;
    series_start(a, r, q, p);
    for (std::size_t j = 0; j < n; ++j) {
        bool crossed = false, diverged = false;
        for (int s = (j == 0 ? 1 : 0); s < m && !crossed && !diverged; ++s) {
            rk4(r, q, p);
            crossed = q <= 0.0;
            diverged = p > 0.0 || std::abs(q) > 10.0 * a;
        }
        r = static_cast<double>(j + 1) * grid.dr();
        res.q[j + 1] = q;
        res.stop_node = j + 1;
        if (crossed || diverged) {
            res.outcome = crossed ? ShootOutcome::Crossed : ShootOutcome::Diverged;
            return res;
        }
    }
    // Reached R without crossing or turning.
    const bool in_band = std::abs(q) < std::exp(-0.5 * grid.radius()) * a;
    res.outcome = in_band ? ShootOutcome::Decay : ShootOutcome::Diverged;
    return res;
}

bool GroundState::certified() const {
    return positive && decreasing && residual_pde < kResidualCertTol &&
           pohozaev_K0 < kPohozaevCertTol && pohozaev_K2 < kPohozaevCertTol;
}

void certify(GroundState& gs) {
    const RadialField& q = gs.profile;
    auto& tr = transform_for(q.grid);

    SpectralField a = tr.forward(q);
    for (std::size_t k = 0; k < a.a.size(); ++k) {
        const double xi = q.grid.frequency(k);
        a.a[k] *= 1.0 + xi * xi;
    }
    const RadialField lin = tr.inverse(a);
    const RadialField cube = pointwise_product(q, pointwise_product(q, q));
    gs.residual_pde = norm(lin - cube, Norm::L2) / norm(q, Norm::L2);

    const FunctionalReport rep = evaluate_functionals(q);
    const double l4 = l4_power4(q);
    gs.pohozaev_K0 = std::abs(rep.K0) / l4;
    gs.pohozaev_K2 = std::abs(rep.K2) / l4;
    gs.JQ = rep.J;
    gs.Q0 = central_value(q);

    gs.positive = true;
    gs.decreasing = true;
    double prev = gs.Q0;
    for (std::size_t i = 0; i < q.w.size(); ++i) {
        const double v = q.value(i);
        if (!(v > 0.0)) gs.positive = false;
        if (!(v < prev)) gs.decreasing = false;
        prev = v;
    }
}

GroundState find_ground_state(const RadialGrid& grid, double tol) {
    if (!(tol >= 1e-12)) throw std::invalid_argument("bracket tolerance must be >= 1e-12");

    double lo = 0.5, hi = 50.0;
    if (shoot_static_ode(lo, grid).outcome != ShootOutcome::Diverged ||
        shoot_static_ode(hi, grid).outcome != ShootOutcome::Crossed) {
        throw std::runtime_error("no shooting bracket in [0.5, 50]; grid too small?");
    }
    while (hi - lo >= tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const ShootOutcome o = shoot_static_ode(mid, grid).outcome;
        (o == ShootOutcome::Crossed ? hi : lo) = mid;
    }

    GroundState gs(grid);
    gs.tol = tol;
    gs.shooting_a = lo;
    const ShootResult shot = shoot_static_ode(lo, grid);
    const double level = 1e-4 * lo;
    std::size_t match = 0;
    for (std::size_t j = 1; j <= shot.stop_node && j < grid.intervals(); ++j) {
        match = j - 1;
        gs.profile.w[j - 1] = grid.node(j - 1) * shot.q[j];
        if (shot.q[j] < level) break;
    }
    stitch_tail(gs.profile, match);

    petviashvili_polish(gs.profile);
    // Far tail below round-off-reliable levels: restitch the exact linear tail.
    const std::size_t far = first_node_below(gs.profile, 1e-10 * gs.profile.value(0));
    if (far < gs.profile.w.size()) stitch_tail(gs.profile, far);

    certify(gs);
    return gs;
}

SystemState standing_wave_state(int sign, const GroundState& gs, double alpha) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    if (!gs.certified()) throw std::invalid_argument("ground state is not certified");
    const RadialGrid& g = gs.profile.grid;
    RadialField u = static_cast<double>(sign) * gs.profile;
    RadialField n = pointwise_product(gs.profile, gs.profile);
    return SystemState(std::move(u), RadialField(g), std::move(n), RadialField(g), alpha);
}

ThresholdStudy threshold_refinement(double radius, std::size_t n, double tol, int levels) {
    if (levels < 3) throw std::invalid_argument("refinement study needs at least 3 levels");
    ThresholdStudy st;
    for (int l = levels - 1; l >= 0; --l) {
        const std::size_t m = n >> l;
        st.sizes.push_back(m);
        st.values.push_back(find_ground_state(RadialGrid::make(radius, m), tol).JQ);
    }
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::abs(st.values.back());
    // Finest triple (i, i+1, i+2) with both differences resolvable.
    std::size_t pick = 0;
    bool found = false;
    for (std::size_t i = 0; i + 2 < st.values.size(); ++i) {
        const double d1 = std::abs(st.values[i + 1] - st.values[i]);
        const double d2 = std::abs(st.values[i + 2] - st.values[i + 1]);
        if (d1 > floor && d2 > floor) {
            pick = i;
            found = true;
        }
    }
    if (!found) {
        // Converged to round-off already on the coarsest triple.
        st.observed_order = std::numeric_limits<double>::infinity();
        st.extrapolated = st.values.back();
        return st;
    }
    const double d1 = st.values[pick + 1] - st.values[pick];
    const double d2 = st.values[pick + 2] - st.values[pick + 1];
    st.observed_order = std::log2(std::abs(d1 / d2));
    const double gain = std::pow(2.0, st.observed_order) - 1.0;
    st.extrapolated = st.values[pick + 2] + d2 / gain;
    return st;
}

// ---------------------------------------------------------------------------
// Cache

std::string ground_state_cache_key(const RadialGrid& grid, double tol) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "R=%.17g;N=%zu;tol=%.17g", grid.radius(), grid.intervals(), tol);
    const uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(buf), static_cast<uInt>(std::strlen(buf)));
    char out[16];
    std::snprintf(out, sizeof out, "%08lx", static_cast<unsigned long>(crc));
    return out;
}

void save_ground_state(const GroundState& gs, const std::filesystem::path& file) {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot write ground-state cache " + file.string());
    const RadialGrid& g = gs.profile.grid;
    char line[128];
    os << kCacheTag << '\n';
    os << "key " << ground_state_cache_key(g, gs.tol) << '\n';
    auto put = [&](const char* name, double v) {
        std::snprintf(line, sizeof line, "%s %.17g\n", name, v);
        os << line;
    };
    put("R", g.radius());
    os << "N " << g.intervals() << '\n';
    put("tol", gs.tol);
    put("Q0", gs.Q0);
    put("JQ", gs.JQ);
    put("residual_pde", gs.residual_pde);
    put("pohozaev_K0", gs.pohozaev_K0);
    put("pohozaev_K2", gs.pohozaev_K2);
    put("shooting_a", gs.shooting_a);
    os << "w " << gs.profile.w.size() << '\n';
    for (double x : gs.profile.w) {
        std::snprintf(line, sizeof line, "%.17g\n", x);
        os << line;
    }
    if (!os) throw std::runtime_error("failed writing ground-state cache " + file.string());
}

std::optional<GroundState> load_ground_state(const std::filesystem::path& file,
                                             const RadialGrid& grid, double tol) {
    std::ifstream is(file);
    if (!is) return std::nullopt;
    std::string tag;
    std::getline(is, tag);
    if (tag != kCacheTag) return std::nullopt;

    std::string name, key;
    is >> name >> key;
    if (name != "key" || key != ground_state_cache_key(grid, tol)) return std::nullopt;

    GroundState gs(grid);
    gs.tol = tol;
    double R = 0;
    std::size_t N = 0, count = 0;
    is >> name >> R >> name >> N >> name >> gs.tol >> name >> gs.Q0 >> name >> gs.JQ >> name >>
        gs.residual_pde >> name >> gs.pohozaev_K0 >> name >> gs.pohozaev_K2 >> name >>
        gs.shooting_a >> name >> count;
    if (!is || R != grid.radius() || N != grid.intervals() || count != grid.size()) {
        return std::nullopt;
    }
    for (double& x : gs.profile.w) is >> x;
    if (!is) return std::nullopt;
    // Certification flags are recomputed rather than trusted.
    certify(gs);
    return gs;
}

GroundState load_or_compute_ground_state(const RadialGrid& grid, double tol,
                                         const std::optional<std::filesystem::path>& cache_dir) {
    std::filesystem::path file;
    if (cache_dir) {
        file = *cache_dir / ("groundstate_" + ground_state_cache_key(grid, tol) + ".txt");
        if (auto gs = load_ground_state(file, grid, tol)) return *gs;
    }
    GroundState gs = find_ground_state(grid, tol);
    if (cache_dir) {
        std::filesystem::create_directories(*cache_dir);
        save_ground_state(gs, file);
    }
    return gs;
}

}  // namespace kgz
