#include "botlab/config.hpp"

#include "botlab/csv.hpp"
#include "botlab/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>

namespace botlab {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// One section: key -> raw value, with every key checked against a whitelist.
class Section {
public:
    Section(std::string name, const pt::ptree* tree, std::set<std::string> allowed)
        : name_(std::move(name)) {
        if (tree == nullptr) return;
        for (const auto& [key, child] : *tree) {
            if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
            if (!child.empty()) throw ConfigError("nested value for '" + key + "' in [" + name_ + "]");
            values_[key] = trim(child.data());
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) > 0; }

    [[nodiscard]] const std::string& raw(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
        return it->second;
    }

    [[nodiscard]] double number(const std::string& key) const { return parse(key, raw(key)); }
    [[nodiscard]] double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    [[nodiscard]] std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const std::string& s = raw(key);
        try {
            std::size_t pos = 0;
            if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
            const auto v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("'" + key + "' in [" + name_ + "] must be a non-negative integer, got '" + s + "'");
        }
    }

    [[nodiscard]] std::vector<double> list(const std::string& key, char sep = ',') const {
        std::vector<double> out;
        for (const auto& item : csv::split(raw(key), sep)) out.push_back(parse(key, trim(item)));
        return out;
    }

    [[nodiscard]] double parse(const std::string& key, const std::string& text) const {
        try {
            return csv::parse_double(text);
        } catch (const Error&) {
            throw ConfigError("'" + key + "' in [" + name_ + "] is not a number: '" + text + "'");
        }
    }

    [[nodiscard]] const std::string& name() const { return name_; }

private:
    std::string name_;
    std::map<std::string, std::string> values_;
};

const pt::ptree* find_section(const pt::ptree& root, const std::string& name) {
    for (const auto& [key, child] : root) {
        if (key == name) return &child;
    }
    return nullptr;
}

TrajectoryModel parse_model(const Section& s) {
    const double duration = s.number("duration", 20.0);
    const std::string kind = s.has("kind") ? s.raw("kind") : "uniform_linear";
    if (kind == "uniform_linear") {
        if (s.has("order")) throw ConfigError("'order' only applies to kind = polynomial");
        return TrajectoryModel::uniform_linear(duration);
    }
    if (kind == "polynomial") return TrajectoryModel::polynomial(s.integer("order", 2), duration);
    throw ConfigError("unknown trajectory model kind '" + kind + "'");
}

std::vector<TurnSegment> parse_segments(const Section& s) {
    std::vector<TurnSegment> out;
    for (const auto& item : csv::split(s.raw("segments"), ',')) {
        const auto parts = csv::split(trim(item), ':');
        if (parts.size() != 3) throw ConfigError("segment '" + trim(item) + "' must be start:end:rate");
        out.push_back({s.parse("segments", trim(parts[0])), s.parse("segments", trim(parts[1])),
                       s.parse("segments", trim(parts[2]))});
    }
    return out;
}

TrajectoryNoiseSpec parse_trajectory_noise(const Section& s) {
    const std::string kind = s.raw("kind");
    auto only = [&](std::set<std::string> keys) {
        for (const std::string k : {"sigma", "covariance", "phi", "sigma_eta"}) {
            if (s.has(k) && !keys.count(k)) throw ConfigError("'" + k + "' does not apply to trajectory noise " + kind);
        }
    };
    TrajectoryNoiseSpec spec;
    if (kind == "none") {
        only({});
        spec = NoTrajectoryNoise{};
    } else if (kind == "isotropic") {
        only({"sigma"});
        spec = IsotropicGaussian{s.number("sigma")};
    } else if (kind == "anisotropic") {
        only({"covariance"});
        const auto c = s.list("covariance");
        if (c.size() != 3) throw ConfigError("covariance must be 'xx, xy, yy'");
        Mat2 m;
        m << c[0], c[1], c[1], c[2];
        spec = AnisotropicGaussian{m};
    } else if (kind == "ar1") {
        only({"phi", "sigma_eta"});
        spec = Ar1Noise{s.number("phi"), s.number("sigma_eta")};
    } else {
        throw ConfigError("unknown trajectory noise kind '" + kind + "'");
    }
    validate(spec);
    return spec;
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::string& origin) {
    pt::ptree root;
    try {
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    static const std::set<std::string> sections{"model", "observer", "truth", "noise.trajectory", "noise.observation",
                                                "run"};
    for (const auto& [key, child] : root) {
        if (!sections.count(key)) throw ConfigError("unknown section [" + key + "] in " + origin);
        if (child.empty() && !child.data().empty()) throw ConfigError("key '" + key + "' outside any section");
    }

    const Section model("model", find_section(root, "model"), {"kind", "order", "duration"});
    const Section observer("observer", find_section(root, "observer"),
                           {"x0", "y0", "heading", "speed", "segments", "transition_half_width",
                            "integration_steps"});
    const Section truth("truth", find_section(root, "truth"), {"theta"});
    const Section traj("noise.trajectory", find_section(root, "noise.trajectory"),
                       {"kind", "sigma", "covariance", "phi", "sigma_eta"});
    const Section obs("noise.observation", find_section(root, "noise.observation"), {"sigma"});
    const Section run("run", find_section(root, "run"),
                      {"name", "n", "r_min", "reps", "seed", "level", "workers"});

    ScenarioConfig cfg;
    Scenario& sc = cfg.scenario;
    sc.model = parse_model(model);

    ObserverSpec o;
    o.initial_position = Vec2(observer.number("x0"), observer.number("y0"));
    o.initial_heading = observer.number("heading");
    o.speed = observer.number("speed", 0.25);
    o.segments = parse_segments(observer);
    o.transition_half_width = observer.number("transition_half_width", 0.5);
    o.integration_steps = static_cast<int>(observer.integer("integration_steps", 4000));
    o.duration = sc.model.duration();
    sc.path = build_observer_path(o);

    const auto theta = truth.list("theta");
    sc.theta_true = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    sc.model.check_dimension(sc.theta_true);

    sc.trajectory_noise = traj.has("kind") ? parse_trajectory_noise(traj) : TrajectoryNoiseSpec{NoTrajectoryNoise{}};
    sc.observation_noise.sigma = obs.number("sigma", 1e-3);
    validate(sc.observation_noise);

    sc.n = run.integer("n", 2000);
    sc.r_min = run.number("r_min", 6.0);
    sc.name = run.has("name") ? run.raw("name") : "scenario";
    cfg.run.reps = run.integer("reps", 1000);
    cfg.run.seed = run.integer("seed", 1);
    cfg.run.level = run.number("level", 0.95);
    cfg.run.workers = run.integer("workers", 0);
    if (sc.n == 0) throw ConfigError("[run] n must be >= 1");
    if (!(cfg.run.level > 0.0 && cfg.run.level < 1.0)) throw ConfigError("[run] level must lie in (0, 1)");
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path);
    return parse_scenario(in, path);
}

}  // namespace botlab
