#include "dynafit/data.hpp"

#include "dynafit/error.hpp"
#include "dynafit/kernels.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <system_error>

namespace dynafit::data {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// 53 random mantissa bits -> [0, 1). Platform independent, unlike
// std::uniform_real_distribution.
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw_in(std::mt19937_64& rng, Interval iv) {
    return iv.lo + unit_double(rng) * (iv.hi - iv.lo);
}

// Unbiased integer in [0, bound) by rejection.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = 0;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty())
        return false;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (*begin == '+')
        ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string_view rest(line);
    while (true) {
        const auto comma = rest.find(',');
        cells.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos)
            break;
        rest.remove_prefix(comma + 1);
    }
    return cells;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

void validate(const LogisticGenConfig& cfg) {
    if (!(cfg.r_range.lo > 0.0 && cfg.r_range.lo <= cfg.r_range.hi && cfg.r_range.hi <= 4.0))
        throw InvalidArgument("r range must be an interval within (0, 4]");
    if (!(cfg.x0_range.lo > 0.0 && cfg.x0_range.lo <= cfg.x0_range.hi && cfg.x0_range.hi < 1.0))
        throw InvalidArgument("x0 range must be an interval within (0, 1)");
    if (cfg.length < 1)
        throw InvalidArgument("trajectory length must be >= 1");
    if (cfg.lyapunov_iters < 1)
        throw InvalidArgument("lyapunov iteration count must be >= 1");
    if (!(cfg.lyapunov_margin >= 0.0))
        throw InvalidArgument("lyapunov margin must be non-negative");
}

std::vector<double> logistic_orbit(double r, double x0, std::size_t steps) {
    std::vector<double> xs(steps);
    double x = x0;
    for (std::size_t k = 0; k < steps; ++k) {
        x = r * x * (1.0 - x);
        xs[k] = x;
    }
    return xs;
}

double logistic_lyapunov(double r, double x, std::size_t iters) {
    double sum = 0.0;
    for (std::size_t k = 0; k < iters; ++k) {
        sum += std::log(std::abs(r * (1.0 - 2.0 * x)));
        x = r * x * (1.0 - x);
    }
    return sum / static_cast<double>(iters);
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt) {
    return splitmix64(splitmix64(splitmix64(seed) ^ index) ^ attempt);
}

LogisticSample draw_logistic(const LogisticGenConfig& cfg, std::uint64_t index,
                             std::uint64_t attempt) {
    std::mt19937_64 rng(sample_seed(cfg.seed, index, attempt));
    LogisticSample s;
    s.r = draw_in(rng, cfg.r_range);
    s.x0 = draw_in(rng, cfg.x0_range);

    double x = s.x0;
    for (std::size_t k = 0; k < cfg.burn_in; ++k)
        x = s.r * x * (1.0 - x);

    const std::size_t steps = std::max(cfg.length, cfg.lyapunov_iters);
    std::vector<double> states(cfg.length);
    double log_sum = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        if (!(x >= 0.0 && x <= 1.0)) {
            std::ostringstream msg;
            msg << "logistic iterate left [0, 1] for r = " << s.r;
            throw DomainError(msg.str());
        }
        if (k < cfg.length)
            states[k] = x;
        if (k < cfg.lyapunov_iters)
            log_sum += std::log(std::abs(s.r * (1.0 - 2.0 * x)));
        x = s.r * x * (1.0 - x);
    }
    s.lyapunov = log_sum / static_cast<double>(cfg.lyapunov_iters);
    s.trajectory = Trajectory::from_series(states);

    const bool in_domain = std::all_of(states.begin(), states.end(), [](double v) {
        return v > 0.0 && v < kLogisticUpperBound;
    });
    if (!in_domain || !std::isfinite(s.lyapunov))
        return s;
    if (s.lyapunov > cfg.lyapunov_margin)
        s.label = kChaotic;
    else if (s.lyapunov < -cfg.lyapunov_margin)
        s.label = kRegular;
    return s;
}

std::vector<LogisticSample> gen_logistic(const LogisticGenConfig& cfg, std::size_t count) {
    validate(cfg);
    std::vector<LogisticSample> out;
    out.reserve(count);
    const std::size_t cap = 1000 * count;
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            LogisticSample s = draw_logistic(cfg, i, attempt);
            if (!s.label.empty()) {
                out.push_back(std::move(s));
                break;
            }
            if (++rejected > cap)
                throw DomainError("logistic generator exceeded its rejection cap; "
                                  "the Lyapunov margin is too wide for the r range");
        }
    }
    return out;
}

std::vector<LogisticSample> gen_logistic_balanced(const LogisticGenConfig& cfg,
                                                  std::size_t per_class) {
    validate(cfg);
    std::vector<LogisticSample> regular;
    std::vector<LogisticSample> chaotic;
    regular.reserve(per_class);
    chaotic.reserve(per_class);
    const std::size_t cap = 1000 * 2 * per_class;
    std::size_t draws = 0;
    for (std::uint64_t i = 0; regular.size() < per_class || chaotic.size() < per_class; ++i) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (++draws > cap)
                throw DomainError("logistic generator exceeded its draw cap; one class is too "
                                  "rare in the configured r range");
            LogisticSample s = draw_logistic(cfg, i, attempt);
            if (s.label.empty())
                continue;
            auto& bucket = s.label == kRegular ? regular : chaotic;
            if (bucket.size() < per_class)
                bucket.push_back(std::move(s));
            break;
        }
    }
    std::vector<LogisticSample> out = std::move(regular);
    std::move(chaotic.begin(), chaotic.end(), std::back_inserter(out));
    return out;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    DatasetManifest m;
    try {
        m.n = j.at("n").get<Eigen::Index>();
        m.N = j.at("N").get<Eigen::Index>();
        for (const auto& f : j.at("files"))
            m.files.push_back({f.at("path").get<std::string>(), f.at("label").get<std::string>()});
        if (j.contains("meta")) {
            for (const auto& [key, value] : j.at("meta").items())
                m.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest " + path.string() + ": " + e.what());
    }
    if (m.n < 1 || m.N < 1)
        throw DataError("manifest " + path.string() + " declares a non-positive shape");
    return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    nlohmann::ordered_json j;
    j["n"] = manifest.n;
    j["N"] = manifest.N;
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : manifest.files)
        j["files"].push_back({{"path", f.path}, {"label", f.label}});
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : manifest.meta)
        j["meta"][key] = value;
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write manifest " + path.string());
    out << j.dump(2) << '\n';
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open trajectory file " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto cells = split_cells(line);
        std::vector<double> row(cells.size());
        std::size_t bad = cells.size();
        for (std::size_t c = 0; c < cells.size() && bad == cells.size(); ++c) {
            if (!parse_double(cells[c], row[c]))
                bad = c;
        }
        const bool header = first_row && bad != cells.size();
        first_row = false;
        if (header)
            continue;
        if (bad != cells.size())
            throw DataError(path.string() + ": row " + std::to_string(line_no) + ", column " +
                            std::to_string(bad + 1) + ": cannot parse '" + cells[bad] +
                            "' as a number");
        if (width == 0)
            width = cells.size();
        if (cells.size() != width)
            throw DataError(path.string() + ": row " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " columns, expected " +
                            std::to_string(width));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw DataError(path.string() + " contains no samples");
    Eigen::MatrixXd states(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t c = 0; c < width; ++c)
            states(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) = rows[k][c];
    return Trajectory(std::move(states));
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write trajectory file " + path.string());
    const auto& s = t.states();
    for (Eigen::Index k = 0; k < s.cols(); ++k) {
        for (Eigen::Index c = 0; c < s.rows(); ++c) {
            if (c > 0)
                out << ',';
            out << format_double(s(c, k));
        }
        out << '\n';
    }
}

LabeledSet load_dataset(const std::filesystem::path& manifest_path) {
    const DatasetManifest m = read_manifest(manifest_path);
    if (m.files.empty())
        throw DataError("manifest " + manifest_path.string() + " lists no files");
    const auto base = manifest_path.parent_path();
    LabeledSet set;
    set.trajectories.reserve(m.files.size());
    for (const auto& entry : m.files) {
        if (entry.label.empty())
            throw DataError("manifest entry " + entry.path + " has an empty label");
        std::filesystem::path file(entry.path);
        if (file.is_relative())
            file = base / file;
        if (!std::filesystem::exists(file))
            throw DataError("missing trajectory file " + file.string());
        Trajectory t = read_trajectory_csv(file);
        if (t.state_dim() != m.n || t.length() != m.N)
            throw DataError("shape mismatch in " + file.string() + ": " +
                            std::to_string(t.length()) + " rows x " +
                            std::to_string(t.state_dim()) + " columns, manifest declares " +
                            std::to_string(m.N) + " x " + std::to_string(m.n));
        set.trajectories.push_back(std::move(t));
        set.labels.push_back(entry.label);
    }
    return set;
}

Trajectory truncate_prefix(const Trajectory& t, Eigen::Index length) {
    if (length < 1 || length > t.length())
        throw InvalidArgument("prefix length " + std::to_string(length) + " outside [1, " +
                              std::to_string(t.length()) + "]");
    return Trajectory(t.states().leftCols(length));
}

std::vector<std::string> distinct_labels(const std::vector<std::string>& labels) {
    std::vector<std::string> out;
    for (const auto& l : labels) {
        if (std::find(out.begin(), out.end(), l) == out.end())
            out.push_back(l);
    }
    return out;
}

TrajectorySet select(const LabeledSet& set, const std::string& label) {
    TrajectorySet out;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.labels[i] == label)
            out.push_back(set.trajectories[i]);
    }
    return out;
}

Split split(const LabeledSet& set, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InvalidArgument("train fraction must lie in (0, 1)");
    if (set.trajectories.size() != set.labels.size())
        throw InvalidArgument("trajectory and label counts differ");
    if (set.size() == 0)
        throw InvalidArgument("cannot split an empty dataset");

    std::mt19937_64 rng(splitmix64(seed));
    std::vector<bool> in_train(set.size(), false);
    for (const auto& label : distinct_labels(set.labels)) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (set.labels[i] == label)
                idx.push_back(i);
        }
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
        const auto take = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(idx.size()))));
        if (take >= idx.size())
            throw InvalidArgument("label '" + label + "' has " + std::to_string(idx.size()) +
                                  " sample(s); the split would leave its test side empty");
        for (std::size_t i = 0; i < take; ++i)
            in_train[idx[i]] = true;
    }

    Split out;
    for (std::size_t i = 0; i < set.size(); ++i) {
        LabeledSet& side = in_train[i] ? out.train : out.test;
        side.trajectories.push_back(set.trajectories[i]);
        side.labels.push_back(set.labels[i]);
    }
    return out;
}

}  // namespace dynafit::data
