#include "dynafit/model_io.hpp"

#include "dynafit/error.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace dynafit {
namespace {

constexpr const char* kKindClassifier = "classifier";
constexpr const char* kKindOneClass = "one-class";
constexpr const char* kChecksumName = "fnv1a64";
constexpr std::uint64_t kMaxHeaderBytes = 1 << 16;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Writer {
public:
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        const auto len = static_cast<std::uint32_t>(s.size());
        for (int i = 0; i < 4; ++i)
            buf_.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
        buf_ += s;
    }
    // Row-major regardless of Eigen's storage order.
    void matrix(const Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                f64(m(r, c));
    }
    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        need(4);
        std::uint32_t len = 0;
        for (int i = 0; i < 4; ++i)
            len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        need(len);
        std::string s = bytes_.substr(pos_, len);
        pos_ += len;
        return s;
    }
    Eigen::MatrixXd matrix(std::uint64_t rows, std::uint64_t cols) {
        if (cols != 0 && rows > (bytes_.size() - pos_) / 8 / cols)
            throw FormatError("model payload is truncated");
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                m(r, c) = f64();
        return m;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n)
            throw FormatError("model payload is truncated");
    }

    const std::string& bytes_;
    std::size_t pos_ = 0;
};

void write_kernel(Writer& w, const KernelSpec& spec) {
    if (const auto* k = std::get_if<PolynomialKernel>(&spec)) {
        w.str("poly");
        w.i64(k->degree);
        w.f64(0.0);
    } else if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
        w.str("gauss");
        w.i64(0);
        w.f64(g->width);
    } else if (std::holds_alternative<LogisticMapKernel>(spec)) {
        w.str("logistic");
        w.i64(0);
        w.f64(0.0);
    } else {
        w.str("logistic-truncated");
        w.i64(std::get<TruncatedLogisticKernel>(spec).truncation);
        w.f64(0.0);
    }
}

KernelSpec read_kernel(Reader& r) {
    const std::string tag = r.str();
    const std::int64_t integer = r.i64();
    const double real = r.f64();
    KernelSpec spec;
    if (tag == "poly")
        spec = PolynomialKernel{static_cast<int>(integer)};
    else if (tag == "gauss")
        spec = GaussianKernel{real};
    else if (tag == "logistic")
        spec = LogisticMapKernel{};
    else if (tag == "logistic-truncated")
        spec = TruncatedLogisticKernel{static_cast<int>(integer)};
    else
        throw FormatError("unknown kernel tag '" + tag + "'");
    return spec;
}

void write_class(Writer& w, const std::string& label, const ClassModel& m) {
    const TrajectorySet& train = m.train_set();
    w.str(label);
    w.u64(train.size());
    w.u64(static_cast<std::uint64_t>(train.front().state_dim()));
    w.u64(static_cast<std::uint64_t>(train.front().length()));
    w.u64(static_cast<std::uint64_t>(m.rank()));
    w.f64(m.eigen_threshold_rel());
    for (const auto& t : train)
        w.matrix(t.states());
    w.matrix(m.V());
    for (Eigen::Index i = 0; i < m.sigma().size(); ++i)
        w.f64(m.sigma()(i));
    w.matrix(m.H());
}

LabeledModel read_class(Reader& r, const KernelSpec& kernel) {
    std::string label = r.str();
    const std::uint64_t p = r.u64();
    const std::uint64_t n = r.u64();
    const std::uint64_t N = r.u64();
    const std::uint64_t k = r.u64();
    const double threshold = r.f64();
    if (p == 0 || n == 0 || N == 0 || k == 0 || k > p)
        throw FormatError("class '" + label + "' has an invalid shape record");
    TrajectorySet train;
    train.reserve(p);
    for (std::uint64_t i = 0; i < p; ++i)
        train.emplace_back(r.matrix(n, N));
    Eigen::MatrixXd V = r.matrix(p, k);
    Eigen::VectorXd sigma = r.matrix(k, 1);
    Eigen::MatrixXd H = r.matrix(p, p);
    try {
        return {std::move(label), ClassModel::from_parts(kernel, std::move(train), std::move(V),
                                                         std::move(sigma), std::move(H), threshold)};
    } catch (const Error& e) {
        throw FormatError("class '" + label + "' is inconsistent: " + e.what());
    }
}

}  // namespace

void save_model(std::ostream& out, const ModelFile& model) {
    Writer w;
    std::string kind;
    if (const auto* c = std::get_if<DynafitClassifier>(&model)) {
        if (c->size() == 0)
            throw InvalidArgument("cannot save a classifier without classes");
        kind = kKindClassifier;
        write_kernel(w, c->classes().front().model.kernel());
        w.u64(c->size());
        for (const auto& cls : c->classes())
            write_class(w, cls.label, cls.model);
    } else {
        const auto& det = std::get<OneClassDetector>(model);
        kind = kKindOneClass;
        write_kernel(w, det.model.kernel());
        w.f64(det.threshold);
        w.u64(1);
        write_class(w, "normal", det.model);
    }

    nlohmann::ordered_json header;
    header["format_name"] = kModelFormatName;
    header["version"] = kModelFormatVersion;
    header["kind"] = kind;
    header["payload_bytes"] = w.bytes().size();
    header["checksum"] = kChecksumName;

    Writer trailer;
    trailer.u64(fnv1a64(w.bytes()));
    out << header.dump() << '\n';
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    out.write(trailer.bytes().data(), 8);
    if (!out)
        throw Error("failed to write model");
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    save_model(out, model);
}

ModelFile load_model(std::istream& in) {
    std::string header_line;
    if (!std::getline(in, header_line) || header_line.size() > kMaxHeaderBytes)
        throw FormatError("model file has no header line");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception&) {
        throw FormatError("model header is not valid JSON");
    }
    if (!header.is_object() || header.value("format_name", "") != kModelFormatName)
        throw FormatError("not a dynafit model file");
    if (!header.contains("version") || !header["version"].is_number_integer())
        throw FormatError("model header has no version");
    if (header["version"].get<int>() != kModelFormatVersion)
        throw VersionError("unsupported model format version " + header["version"].dump() +
                           " (expected " + std::to_string(kModelFormatVersion) + ")");
    const std::string kind = header.value("kind", "");
    if (kind != kKindClassifier && kind != kKindOneClass)
        throw FormatError("unknown model kind '" + kind + "'");
    if (header.value("checksum", "") != kChecksumName)
        throw FormatError("unsupported checksum scheme");
    if (!header.contains("payload_bytes") || !header["payload_bytes"].is_number_unsigned())
        throw FormatError("model header has no payload size");

    const auto payload_bytes = header["payload_bytes"].get<std::uint64_t>();
    std::string payload;
    // Read in chunks so a corrupt size cannot trigger a huge allocation up front.
    constexpr std::uint64_t kChunk = 1 << 20;
    while (payload.size() < payload_bytes) {
        const auto want = std::min<std::uint64_t>(kChunk, payload_bytes - payload.size());
        const auto old = payload.size();
        payload.resize(old + want);
        in.read(payload.data() + old, static_cast<std::streamsize>(want));
        if (static_cast<std::uint64_t>(in.gcount()) != want)
            throw FormatError("model payload is truncated");
    }
    std::string trailer(8, '\0');
    in.read(trailer.data(), 8);
    if (in.gcount() != 8)
        throw FormatError("model checksum is missing");
    if (Reader(trailer).u64() != fnv1a64(payload))
        throw ChecksumError("model checksum mismatch");

    Reader r(payload);
    const KernelSpec kernel = read_kernel(r);
    try {
        validate(kernel);
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid kernel parameters: ") + e.what());
    }
    ModelFile result;
    if (kind == kKindOneClass) {
        const double threshold = r.f64();
        if (r.u64() != 1)
            throw FormatError("one-class model must hold exactly one class");
        LabeledModel lm = read_class(r, kernel);
        if (!(threshold > 0.0))
            throw FormatError("one-class threshold must be positive");
        result = OneClassDetector{std::move(lm.model), threshold};
    } else {
        const std::uint64_t count = r.u64();
        if (count == 0)
            throw FormatError("classifier holds no classes");
        DynafitClassifier c;
        for (std::uint64_t i = 0; i < count; ++i) {
            LabeledModel lm = read_class(r, kernel);
            try {
                c.add_class(std::move(lm.label), std::move(lm.model));
            } catch (const InvalidArgument& e) {
                throw FormatError(e.what());
            }
        }
        result = std::move(c);
    }
    if (!r.done())
        throw FormatError("model payload has trailing bytes");
    return result;
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open model file " + path.string());
    return load_model(in);
}

}  // namespace dynafit
