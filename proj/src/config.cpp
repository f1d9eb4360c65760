#include "divest/config.hpp"

#include "divest/error.hpp"
#include "divest/kde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace divest {

using nlohmann::json;

namespace {

using Path = std::vector<std::string>;

std::size_t line_at(std::string_view text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

// Line of the innermost key in `path`, searching each key after its parent.
std::size_t line_of(std::string_view text, const Path& path) {
    std::size_t pos = 0, found = 0;
    for (const auto& key : path) {
        const std::string quoted = "\"" + key + "\"";
        std::size_t at = pos;
        bool hit = false;
        while ((at = text.find(quoted, at)) != std::string_view::npos) {
            std::size_t after = at + quoted.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
            if (after < text.size() && text[after] == ':') {
                hit = true;
                break;
            }
            at += quoted.size();
        }
        if (!hit) break;
        found = at;
        pos = at + quoted.size();
    }
    return line_at(text, found);
}

std::string join(const Path& path) {
    std::string s;
    for (const auto& p : path) s += (s.empty() ? "" : ".") + p;
    return s.empty() ? "<root>" : s;
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const Path& path, const std::string& what) const {
        throw ConfigError("line " + std::to_string(line_of(text_, path)) + ": " + join(path) + ": " + what);
    }

    const json* find(const json& obj, const Path& path, const std::string& key) const {
        if (!obj.is_object()) fail(path, "expected an object");
        auto it = obj.find(key);
        return it == obj.end() || it->is_null() ? nullptr : &*it;
    }

    double number(const json& v, const Path& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(path, "expected a finite number");
        return x;
    }

    std::size_t count(const json& v, const Path& path) const {
        if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected a non-negative integer");
        if (v.is_number_integer() && v.get<long long>() < 0) fail(path, "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    std::string string(const json& v, const Path& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const json& v, const Path& path) const {
        if (v.is_number()) return {number(v, path)};
        if (!v.is_array() || v.empty()) fail(path, "expected a number or a non-empty array of numbers");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(number(e, path));
        return out;
    }

    template <class T, class F>
    void optional(const json& obj, const Path& parent, const std::string& key, T& target, F convert) const {
        Path p = parent;
        p.push_back(key);
        if (const json* v = find(obj, parent, key)) target = convert(*v, p);
    }

    std::string_view text() const { return text_; }

private:
    std::string_view text_;
};

DensitySpec read_density(const Reader& r, const json& obj, const Path& path) {
    if (!obj.is_object()) r.fail(path, "expected a distribution object");
    DensitySpec spec;
    const json* fam = r.find(obj, path, "family");
    if (!fam) r.fail(path, "missing \"family\"");
    Path fam_path = path;
    fam_path.push_back("family");
    const std::string name = r.string(*fam, fam_path);
    auto field = [&](const char* key) {
        Path p = path;
        p.push_back(key);
        const json* v = r.find(obj, path, key);
        if (!v) r.fail(path, std::string("missing \"") + key + "\" for family " + name);
        return r.numbers(*v, p);
    };
    if (name == "gaussian") {
        spec.family = DensityFamily::Gaussian;
        spec.mean = field("mean");
        spec.sd = field("sd");
    } else if (name == "uniform") {
        spec.family = DensityFamily::UniformBox;
        spec.lower = field("lower");
        spec.upper = field("upper");
    } else if (name == "truncated_gaussian") {
        spec.family = DensityFamily::TruncatedGaussian;
        spec.mean = field("mean");
        spec.sd = field("sd");
        spec.lower = field("lower");
        spec.upper = field("upper");
    } else if (name == "gaussian_mixture") {
        spec.family = DensityFamily::GaussianMixture;
        spec.weights = field("weights");
        Path cp = path;
        cp.push_back("components");
        const json* comps = r.find(obj, path, "components");
        if (!comps || !comps->is_array() || comps->empty())
            r.fail(cp, "gaussian_mixture needs a non-empty \"components\" array of {mean, sd}");
        for (const auto& c : *comps) {
            Path mp = cp, sp = cp;
            mp.push_back("mean");
            sp.push_back("sd");
            const json* m = r.find(c, cp, "mean");
            const json* s = r.find(c, cp, "sd");
            if (!m || !s) r.fail(cp, "each component needs \"mean\" and \"sd\"");
            spec.means.push_back(r.numbers(*m, mp));
            spec.sds.push_back(r.numbers(*s, sp));
        }
    } else {
        r.fail(fam_path, "unknown distribution family \"" + name +
                      "\" (expected gaussian, gaussian_mixture, uniform or truncated_gaussian)");
    }
    try {
        (void)spec.build();
    } catch (const std::exception& e) {
        r.fail(path, e.what());
    }
    return spec;
}

// Compact supports clip the box; unbounded densities contribute their effective box.
Box default_box(const AnalyticDensity& f, const AnalyticDensity& g, double pad) {
    Box fb = f.effective_box();
    for (int k = 0; k < fb.dimension(); ++k) {
        fb.lower[k] -= pad;
        fb.upper[k] += pad;
    }
    Box box = fb.intersect(g.effective_box());
    if (g.support()) box = box.intersect(*g.support());
    return box;
}

std::size_t default_points(int d, const Box& box, double h_min) {
    if (d == 2) return 201;
    if (d == 3) return 41;
    const double width = box.upper[0] - box.lower[0];
    const double wanted = std::ceil(width / (h_min / 4.0)) + 1.0;
    return static_cast<std::size_t>(std::clamp(wanted, 401.0, 6001.0));
}

std::vector<std::size_t> used_sample_sizes(const ExperimentConfig& c) {
    std::vector<std::size_t> ns = c.n_schedule;
    ns.push_back(c.estimate.n);
    ns.push_back(c.ci.n);
    return ns;
}

}  // namespace

AnalyticDensity DensitySpec::build() const {
    switch (family) {
        case DensityFamily::Gaussian: return AnalyticDensity::gaussian(mean, sd);
        case DensityFamily::GaussianMixture: return AnalyticDensity::mixture(weights, means, sds);
        case DensityFamily::UniformBox: return AnalyticDensity::uniform_box(lower, upper);
        case DensityFamily::TruncatedGaussian: return AnalyticDensity::truncated_gaussian(mean, sd, lower, upper);
    }
    throw ConfigError("unknown density family");
}

int DensitySpec::dimension() const {
    if (family == DensityFamily::GaussianMixture) return means.empty() ? 0 : static_cast<int>(means.front().size());
    if (family == DensityFamily::UniformBox) return static_cast<int>(lower.size());
    return static_cast<int>(mean.size());
}

double ExperimentConfig::midpoint_bandwidth(const BandwidthRange& range, std::size_t n) {
    return std::sqrt(range.lower(n) * range.upper(n));
}

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("line " + std::to_string(line_at(text, e.byte == 0 ? 0 : e.byte - 1)) +
                          ": malformed JSON: " + e.what());
    }
    const Reader r(text);
    if (!doc.is_object()) r.fail({}, "top level must be a JSON object");

    static const std::vector<std::string> known = {"f", "g", "kernel", "alpha", "n_schedule", "bandwidth",
                                                   "threshold", "replications", "seed", "grid", "mc_samples",
                                                   "output_dir", "estimate", "ci"};
    for (const auto& [key, value] : doc.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) r.fail({key}, "unknown setting");

    ExperimentConfig c;
    for (const char* who : {"f", "g"}) {
        const json* v = r.find(doc, {}, who);
        if (!v) r.fail({}, std::string("missing distribution \"") + who + "\"");
        (std::string(who) == "f" ? c.f_spec : c.g_spec) = read_density(r, *v, {who});
    }
    const int d = c.f_spec.dimension();
    if (c.g_spec.dimension() != d) r.fail({"g"}, "f and g must have the same dimension");
    if (d < 1 || d > 3) r.fail({"f"}, "dimension must be 1, 2 or 3");

    c.kernel.dimension = d;
    if (const json* k = r.find(doc, {}, "kernel")) {
        if (const json* fam = r.find(*k, {"kernel"}, "family")) {
            const std::string name = r.string(*fam, {"kernel", "family"});
            try {
                c.kernel.family = kernel_family_from_name(name);
            } catch (const std::exception&) {
                r.fail({"kernel", "family"}, "unknown kernel family \"" + name + "\" (expected gaussian, epanechnikov or box)");
            }
        }
        r.optional(*k, {"kernel"}, "order", c.kernel.claimed_order,
                   [&](const json& v, const Path& p) { return static_cast<int>(r.count(v, p)); });
        if (c.kernel.claimed_order < 2) r.fail({"kernel", "order"}, "kernel order must be >= 2");
    }

    if (const json* a = r.find(doc, {}, "alpha")) {
        c.alphas = r.numbers(*a, {"alpha"});
        for (double x : c.alphas)
            if (!(x > 0.0 && x < 1.0)) r.fail({"alpha"}, "alpha must lie strictly inside (0, 1)");
    }

    if (const json* ns = r.find(doc, {}, "n_schedule")) {
        if (!ns->is_array() || ns->empty()) r.fail({"n_schedule"}, "expected a non-empty array of sample sizes");
        c.n_schedule.clear();
        for (const auto& v : *ns) c.n_schedule.push_back(r.count(v, {"n_schedule"}));
        if (!std::is_sorted(c.n_schedule.begin(), c.n_schedule.end()) ||
            std::adjacent_find(c.n_schedule.begin(), c.n_schedule.end()) != c.n_schedule.end())
            r.fail({"n_schedule"}, "sample sizes must be strictly increasing");
    }

    c.range = BandwidthRange::default_for(d);
    if (const json* b = r.find(doc, {}, "bandwidth")) {
        const Path p{"bandwidth"};
        auto num = [&](const json& v, const Path& q) { return r.number(v, q); };
        r.optional(*b, p, "c_lower", c.range.c_lower, num);
        r.optional(*b, p, "exponent_lower", c.range.exponent_lower, num);
        r.optional(*b, p, "c_upper", c.range.c_upper, num);
        r.optional(*b, p, "exponent_upper", c.range.exponent_upper, num);
        r.optional(*b, p, "grid_size", c.range.grid_size, [&](const json& v, const Path& q) { return r.count(v, q); });
        if (c.range.grid_size < 1) r.fail({"bandwidth", "grid_size"}, "grid_size must be >= 1");
        if (!(c.range.c_lower > 0.0) || !(c.range.c_upper > 0.0)) r.fail(p, "bandwidth constants must be positive");
        if (!(c.range.exponent_lower > 0.0 && c.range.exponent_lower < 1.0))
            r.fail({"bandwidth", "exponent_lower"}, "exponent_lower must lie in (0, 1)");
        if (!(c.range.exponent_upper > 0.0)) r.fail({"bandwidth", "exponent_upper"}, "exponent_upper must be positive");
    }

    if (const json* t = r.find(doc, {}, "threshold")) {
        auto num = [&](const json& v, const Path& q) { return r.number(v, q); };
        r.optional(*t, {"threshold"}, "beta", c.thresholds.beta, num);
        r.optional(*t, {"threshold"}, "delta", c.thresholds.delta, num);
        try {
            c.thresholds.check();
        } catch (const std::exception& e) {
            r.fail({"threshold"}, e.what());
        }
    }

    auto cnt = [&](const json& v, const Path& q) { return r.count(v, q); };
    r.optional(doc, {}, "replications", c.replications, cnt);
    if (c.replications < 1) r.fail({"replications"}, "replications must be >= 1");
    r.optional(doc, {}, "seed", c.seed, [&](const json& v, const Path& q) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            r.fail(q, "seed must be a non-negative integer");
        return v.get<std::uint64_t>();
    });
    r.optional(doc, {}, "mc_samples", c.mc_samples, cnt);
    if (c.mc_samples < 2) r.fail({"mc_samples"}, "mc_samples must be >= 2");
    r.optional(doc, {}, "output_dir", c.output_dir, [&](const json& v, const Path& q) { return r.string(v, q); });

    auto positive = [&](const json& v, const Path& q) {
        const double x = r.number(v, q);
        if (!(x > 0.0)) r.fail(q, "must be positive");
        return std::optional<double>(x);
    };
    if (const json* e = r.find(doc, {}, "estimate")) {
        r.optional(*e, {"estimate"}, "n", c.estimate.n, cnt);
        r.optional(*e, {"estimate"}, "h", c.estimate.h, positive);
    }
    if (const json* ci = r.find(doc, {}, "ci")) {
        const Path p{"ci"};
        r.optional(*ci, p, "n", c.ci.n, cnt);
        r.optional(*ci, p, "h", c.ci.h, positive);
        r.optional(*ci, p, "gamma_floor", c.ci.gamma_floor, positive);
        r.optional(*ci, p, "epsilon", c.ci.epsilon, [&](const json& v, const Path& q) { return r.number(v, q); });
        r.optional(*ci, p, "replications", c.ci.replications, cnt);
        if (c.ci.epsilon < 0.0) r.fail({"ci", "epsilon"}, "epsilon must be nonnegative");
        if (c.ci.replications < 1) r.fail({"ci", "replications"}, "replications must be >= 1");
    }
    if (c.estimate.n < 3) r.fail({"estimate", "n"}, "n must be >= 3 (log log n must be positive)");
    if (c.ci.n < 3) r.fail({"ci", "n"}, "n must be >= 3 (log log n must be positive)");
    for (auto* h : {&c.estimate.h, &c.ci.h})
        if (*h && !(**h < 1.0)) r.fail({h == &c.estimate.h ? "estimate" : "ci", "h"}, "bandwidth must lie in (0, 1)");

    try {
        c.range.check_feasible(c.n_schedule);
        c.range.check_feasible({c.estimate.n});
        c.range.check_feasible({c.ci.n});
    } catch (const std::exception& e) {
        r.fail({"bandwidth"}, e.what());
    }

    const AnalyticDensity f = c.f(), g = c.g();
    double h_min = 1.0, h_max = 0.0;
    for (std::size_t n : used_sample_sizes(c)) {
        h_min = std::min(h_min, c.range.lower(n));
        h_max = std::max(h_max, c.range.upper(n));
    }
    for (const auto& h : {c.estimate.h, c.ci.h})
        if (h) {
            h_min = std::min(h_min, *h);
            h_max = std::max(h_max, *h);
        }
    c.grid_box = default_box(f, g, kernel_support_radius(c.kernel.family) * h_max);
    if (const json* gr = r.find(doc, {}, "grid")) {
        const Path p{"grid"};
        const json* lo = r.find(*gr, p, "lower");
        const json* up = r.find(*gr, p, "upper");
        if (static_cast<bool>(lo) != static_cast<bool>(up)) r.fail(p, "give both \"lower\" and \"upper\" or neither");
        if (lo) {
            c.grid_box.lower = r.numbers(*lo, {"grid", "lower"});
            c.grid_box.upper = r.numbers(*up, {"grid", "upper"});
            if (c.grid_box.dimension() != d || static_cast<int>(c.grid_box.upper.size()) != d)
                r.fail(p, "grid bounds must have one entry per dimension");
        }
        r.optional(*gr, p, "points_per_axis", c.points_per_axis, cnt);
        if (const json* pts = r.find(*gr, p, "points_per_axis"); pts && c.points_per_axis < 2)
            r.fail({"grid", "points_per_axis"}, "points_per_axis must be >= 2");
    }
    if (c.grid_box.empty()) r.fail({"grid"}, "grid box is empty (f and g effective supports do not overlap)");
    if (c.points_per_axis == 0) c.points_per_axis = default_points(d, c.grid_box, h_min);

    try {
        validate_config(c);
    } catch (const ConfigError& e) {
        r.fail({"g"}, e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& c) {
    for (double a : c.alphas)
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha must lie strictly inside (0, 1)");
    c.range.check_feasible(c.n_schedule);
    const AnalyticDensity g = c.g();
    const EvaluationGrid grid = c.grid();
    const auto g_values = density_on_grid(g, grid);
    for (std::size_t i = 0; i < g_values.size(); ++i)
        if (!(g_values[i] > 0.0)) {
            const auto x = grid.node(i);
            std::string at;
            for (double v : x) at += (at.empty() ? "" : ", ") + std::to_string(v);
            throw ConfigError("g vanishes on the grid box at (" + at + "); shrink the grid to the support of g");
        }
    for (double a : c.alphas) {
        double value = 0.0;
        try {
            value = power_integral(g, 1.0 - a);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("int g^(1-alpha) failed the tail check: ") + e.what());
        }
        if (!std::isfinite(value) || !(value > 0.0)) throw ConfigError("int g^(1-alpha) is not finite");
    }
}

json density_spec_to_json(const DensitySpec& s) {
    json j;
    j["family"] = std::string(density_family_name(s.family));
    switch (s.family) {
        case DensityFamily::Gaussian:
            j["mean"] = s.mean;
            j["sd"] = s.sd;
            break;
        case DensityFamily::UniformBox:
            j["lower"] = s.lower;
            j["upper"] = s.upper;
            break;
        case DensityFamily::TruncatedGaussian:
            j["mean"] = s.mean;
            j["sd"] = s.sd;
            j["lower"] = s.lower;
            j["upper"] = s.upper;
            break;
        case DensityFamily::GaussianMixture: {
            j["weights"] = s.weights;
            json comps = json::array();
            for (std::size_t i = 0; i < s.means.size(); ++i) comps.push_back({{"mean", s.means[i]}, {"sd", s.sds[i]}});
            j["components"] = comps;
            break;
        }
    }
    return j;
}

json materialize(const ExperimentConfig& c) {
    json j;
    j["f"] = density_spec_to_json(c.f_spec);
    j["g"] = density_spec_to_json(c.g_spec);
    j["kernel"] = {{"family", std::string(kernel_family_name(c.kernel.family))}, {"order", c.kernel.claimed_order}};
    j["alpha"] = c.alphas;
    j["n_schedule"] = c.n_schedule;
    j["bandwidth"] = {{"c_lower", c.range.c_lower},
                      {"exponent_lower", c.range.exponent_lower},
                      {"c_upper", c.range.c_upper},
                      {"exponent_upper", c.range.exponent_upper},
                      {"grid_size", c.range.grid_size}};
    j["threshold"] = {{"beta", c.thresholds.beta}, {"delta", c.thresholds.delta}};
    j["replications"] = c.replications;
    j["seed"] = c.seed;
    j["grid"] = {{"lower", c.grid_box.lower}, {"upper", c.grid_box.upper}, {"points_per_axis", c.points_per_axis}};
    j["mc_samples"] = c.mc_samples;
    j["estimate"] = {{"n", c.estimate.n},
                     {"h", c.estimate.h ? json(*c.estimate.h) : json(ExperimentConfig::midpoint_bandwidth(c.range, c.estimate.n))}};
    j["ci"] = {{"n", c.ci.n},
               {"h", c.ci.h ? json(*c.ci.h) : json(ExperimentConfig::midpoint_bandwidth(c.range, c.ci.n))},
               {"gamma_floor", c.ci.gamma_floor ? json(*c.ci.gamma_floor) : json(nullptr)},
               {"epsilon", c.ci.epsilon},
               {"replications", c.ci.replications}};
    return j;
}

}  // namespace divest
