#include "qwalk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qwalk/errors.hpp"
#include "json_writer.hpp"

namespace qwalk {

namespace {

void validate_probability_vector(const Eigen::VectorXd& p) {
    if (p.size() == 0) throw ValidationError("probability vector: empty");
    if (p.minCoeff() < -1e-12) throw ValidationError("probability vector: negative entry");
    if (std::abs(p.sum() - 1.0) > 1e-9)
        throw ValidationError("probability vector: entries do not sum to 1");
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw ValidationError("fit: degenerate abscissa (no spread)");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / double(n));
    return f;
}

}  // namespace

double nmi(const Partition& x, const Partition& y) {
    if (x.n() != y.n()) throw ValidationError("nmi: partitions have different lengths");
    const int n = x.n();
    const int kx = x.k(), ky = y.k();
    std::vector<double> cx(std::size_t(kx), 0.0), cy(std::size_t(ky), 0.0);
    std::vector<double> joint(std::size_t(kx) * std::size_t(ky), 0.0);
    for (int i = 0; i < n; ++i) {
        const int a = x.assignment[std::size_t(i)];
        const int b = y.assignment[std::size_t(i)];
        cx[std::size_t(a)] += 1.0;
        cy[std::size_t(b)] += 1.0;
        joint[std::size_t(a) * std::size_t(ky) + std::size_t(b)] += 1.0;
    }
    const double nn = double(n);
    double hx = 0.0, hy = 0.0, mi = 0.0;
    for (double c : cx)
        if (c > 0.0) hx -= c / nn * std::log(c / nn);
    for (double c : cy)
        if (c > 0.0) hy -= c / nn * std::log(c / nn);
    for (int a = 0; a < kx; ++a)
        for (int b = 0; b < ky; ++b) {
            const double c = joint[std::size_t(a) * std::size_t(ky) + std::size_t(b)];
            if (c > 0.0)
                mi += c / nn *
                      std::log(c * nn / (cx[std::size_t(a)] * cy[std::size_t(b)]));
        }
    // Both partitions trivial: identical by definition. One trivial: zero
    // information shared. The formula itself yields 0 for the latter.
    if (hx == 0.0 && hy == 0.0) return 1.0;
    return std::clamp(2.0 * mi / (hx + hy), 0.0, 1.0);
}

double shannon_entropy(const Eigen::VectorXd& p) {
    validate_probability_vector(p);
    double h = 0.0;
    for (int i = 0; i < p.size(); ++i)
        if (p(i) > 0.0) h -= p(i) * std::log(p(i));
    return h;
}

double renyi_entropy(const Eigen::VectorXd& p, double q) {
    if (!(q >= 0.0)) throw ValidationError("renyi entropy: q must be >= 0");
    if (q == 1.0) return shannon_entropy(p);
    validate_probability_vector(p);
    // ln(sum p^q) = q ln pmax + ln(sum (p/pmax)^q) keeps the sum in [1, n]
    // so large q neither under- nor overflows.
    const double pmax = p.maxCoeff();
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i)
        if (p(i) > 0.0) s += std::pow(p(i) / pmax, q);
    return (q * std::log(pmax) + std::log(s)) / (1.0 - q);
}

std::string fit_result_to_json(const FitResult& r) {
    JsonWriter w;
    w.begin_object();
    w.key("kappa1");
    w.value(r.kappa1);
    w.key("kappa2");
    w.value(r.kappa2);
    w.key("kappa3");
    w.value(r.kappa3);
    w.key("residual");
    w.value(r.residual);
    w.end_object();
    return w.str();
}

FitResult fit_power_law(const std::vector<double>& mean_degrees,
                        const std::vector<double>& epsilons) {
    if (mean_degrees.size() != epsilons.size())
        throw ValidationError("power-law fit: input lengths differ");
    if (std::set<double>(mean_degrees.begin(), mean_degrees.end()).size() < 3)
        throw ValidationError("power-law fit: need at least 3 distinct mean degrees");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < mean_degrees.size(); ++i) {
        if (!(mean_degrees[i] > 0.0) || !(epsilons[i] > 0.0))
            throw ValidationError("power-law fit: degrees and quantumness must be positive");
        lx.push_back(std::log(mean_degrees[i]));
        ly.push_back(std::log(epsilons[i]));
    }
    const LineFit f = least_squares(lx, ly);
    FitResult r;
    r.kappa1 = std::exp(f.intercept);
    r.kappa2 = -f.slope;
    r.residual = f.residual;
    return r;
}

namespace {

std::vector<Edge> model_edges(GenModel model, int n, double mean_degree,
                              std::mt19937_64& rng) {
    switch (model) {
        case GenModel::er:
            return er_edges(n, int(std::lround(mean_degree * n / 2.0)), rng);
        case GenModel::ws:
            return ws_edges(n, int(std::lround(mean_degree * n / 2.0)), rng);
        case GenModel::rg:
            return rg_edges(n, int(std::lround(mean_degree * n / 2.0)), rng);
        case GenModel::ba:
            return ba_edges(n, int(std::lround(mean_degree / 2.0)), rng);
        case GenModel::planted:
            break;
    }
    throw ValidationError("degree sweep: unsupported model");
}

}  // namespace

FitResult fit_quantumness_vs_degree(GenModel model, int n,
                                    const std::vector<double>& mean_degrees,
                                    int seeds_per_point, std::uint64_t seed) {
    if (seeds_per_point < 1)
        throw ValidationError("degree sweep: seeds_per_point must be >= 1");
    std::vector<double> eps_means;
    for (std::size_t idx = 0; idx < mean_degrees.size(); ++idx) {
        double acc = 0.0;
        for (int rep = 0; rep < seeds_per_point; ++rep) {
            auto rng = substream(seed, idx * std::size_t(seeds_per_point) + std::size_t(rep));
            const auto edges = model_edges(model, n, mean_degrees[idx], rng);
            // Raw model degrees, isolated nodes included: the sweep measures
            // the model's degree distribution, not the giant component's.
            Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
            for (const auto& e : edges) {
                d(e.i) += e.w;
                d(e.j) += e.w;
            }
            const double mean_sqrt = d.cwiseSqrt().mean();
            acc += 1.0 - mean_sqrt * mean_sqrt / d.mean();
        }
        eps_means.push_back(acc / double(seeds_per_point));
    }
    return fit_power_law(mean_degrees, eps_means);
}

FitResult fit_kappa3(const Eigen::VectorXd& p_c, const Eigen::VectorXd& p_qc,
                     const Eigen::VectorXd& degrees) {
    if (p_c.size() != p_qc.size() || p_c.size() != degrees.size())
        throw ValidationError("kappa3 fit: input lengths differ");
    validate_probability_vector(p_c);
    validate_probability_vector(p_qc);
    std::vector<double> lx, ly;
    std::set<double> distinct;
    for (int i = 0; i < degrees.size(); ++i) {
        if (degrees(i) < 2.0) continue;
        if (!(p_c(i) > 0.0) || !(p_qc(i) > 0.0)) continue;
        lx.push_back(std::log(degrees(i)));
        ly.push_back(std::log(p_qc(i) / p_c(i)));
        distinct.insert(degrees(i));
    }
    if (distinct.size() < 2)
        throw ValidationError("kappa3 fit: need at least 2 distinct degrees >= 2");
    const LineFit f = least_squares(lx, ly);
    FitResult r;
    r.kappa3 = -f.slope;
    r.residual = f.residual;
    return r;
}

}  // namespace qwalk
