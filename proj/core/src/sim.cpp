#include "botlab/sim.hpp"

#include "botlab/csv.hpp"
#include "botlab/errors.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace botlab {

namespace {

// FNV-1a over the textual form of each parameter.
class Hasher {
public:
    void add(std::string_view s) {
        for (unsigned char c : s) {
            h_ ^= c;
            h_ *= 0x100000001b3ULL;
        }
        h_ ^= 0xff;
        h_ *= 0x100000001b3ULL;
    }
    void add(double v) { add(csv::format(v)); }
    [[nodiscard]] std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

ValidityReport validate_scenario(const Scenario& s) {
    s.model.check_dimension(s.theta_true);
    validate(s.trajectory_noise);
    validate(s.observation_noise);
    if (s.n < s.model.dimension()) {
        throw ConfigError("scenario needs at least as many observations as parameters");
    }
    if (!(s.r_min > 0.0)) throw ConfigError("r_min must be positive");
    return validate_geometry(s.model, s.theta_true, s.path, s.r_min);
}

std::uint64_t fingerprint(const Scenario& s) {
    Hasher h;
    h.add(s.model.name());
    h.add(static_cast<double>(s.model.basis_size()));
    h.add(s.model.duration());
    for (double v : s.theta_true) h.add(v);
    const auto& o = s.path.spec();
    h.add(o.initial_position.x());
    h.add(o.initial_position.y());
    h.add(o.initial_heading);
    h.add(o.speed);
    for (const auto& seg : o.segments) {
        h.add(seg.start_s);
        h.add(seg.end_s);
        h.add(seg.turn_rate);
    }
    h.add(o.transition_half_width);
    h.add(o.duration);
    h.add(static_cast<double>(o.integration_steps));
    h.add(describe(s.trajectory_noise));
    h.add(s.observation_noise.sigma);
    h.add(static_cast<double>(s.n));
    return h.value();
}

Dataset simulate(const Scenario& s, std::uint64_t seed, bool keep_latent) {
    s.model.check_dimension(s.theta_true);
    if (s.n == 0) throw ConfigError("scenario needs n >= 1");
    Rng traj_rng = make_stream(seed, 0, StreamRole::trajectory_noise);
    Rng obs_rng = make_stream(seed, 0, StreamRole::observation_noise);
    const auto eps = sample_trajectory_noise(s.trajectory_noise, s.n, traj_rng);
    const auto v = sample_observation_noise(s.observation_noise, s.n, obs_rng);

    Dataset data;
    data.t.resize(s.n);
    data.y.resize(s.n);
    data.fingerprint = fingerprint(s);
    data.seed = seed;
    if (keep_latent) data.latent.emplace(s.n);
    const double n = static_cast<double>(s.n);
    for (std::size_t k = 0; k < s.n; ++k) {
        const double t = static_cast<double>(k + 1) / n;
        const Vec2 x = s.model.position(s.theta_true, t) + eps[k];
        const Vec2 o = s.path.position(t);
        if (x == o) {
            std::ostringstream os;
            os << "simulated target coincides with the observer at k=" << k + 1;
            throw SingularGeometryError(os.str());
        }
        data.t[k] = t;
        data.y[k] = wrap_angle(bearing(x, o).value() + v[k]);
        if (keep_latent) (*data.latent)[k] = x;
    }
    return data;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    const bool latent = data.latent.has_value();
    out << (latent ? "k,t,Y,X1,X2\n" : "k,t,Y\n");
    for (std::size_t k = 0; k < data.size(); ++k) {
        out << k + 1 << ',' << csv::format(data.t[k]) << ',' << csv::format(data.y[k]);
        if (latent) {
            const Vec2& x = (*data.latent)[k];
            out << ',' << csv::format(x.x()) << ',' << csv::format(x.y());
        }
        out << '\n';
    }
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_dataset_csv(out, data);
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!csv::read_line(in, line)) throw IoError("dataset CSV is empty");
    bool latent = false;
    if (line == "k,t,Y,X1,X2") {
        latent = true;
    } else if (line != "k,t,Y") {
        throw IoError("unexpected dataset CSV header: " + line);
    }
    Dataset data;
    if (latent) data.latent.emplace();
    std::size_t expected = 1;
    while (csv::read_line(in, line)) {
        if (line.empty()) continue;
        const auto fields = csv::split(line);
        if (fields.size() != (latent ? 5u : 3u)) throw IoError("malformed dataset row: " + line);
        if (std::stoull(fields[0]) != expected) throw IoError("dataset rows must be numbered 1..n in order");
        ++expected;
        data.t.push_back(csv::parse_double(fields[1]));
        data.y.push_back(csv::parse_double(fields[2]));
        if (latent) data.latent->emplace_back(csv::parse_double(fields[3]), csv::parse_double(fields[4]));
    }
    if (data.t.empty()) throw IoError("dataset CSV has no rows");
    for (std::size_t k = 1; k < data.t.size(); ++k) {
        if (!(data.t[k] > data.t[k - 1])) throw IoError("dataset times must be strictly increasing");
    }
    return data;
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_dataset_csv(in);
}

}  // namespace botlab
