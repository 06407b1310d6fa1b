#include "dynafit/error.hpp"
#include "dynafit/model_io.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace dynafit;
using dynafit::testing::random_set;

namespace {

DynafitClassifier two_class(const KernelSpec& k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    DynafitClassifier c;
    c.add_class("alpha", fit_class_model(k, random_set(rng, 5, 1, 3, 0.0, 0.9)));
    c.add_class("beta", fit_class_model(k, random_set(rng, 4, 1, 3, 0.0, 0.9), 1e-6));
    return c;
}

std::string serialize(const ModelFile& m) {
    std::ostringstream out;
    save_model(out, m);
    return out.str();
}

ModelFile parse(const std::string& bytes) {
    std::istringstream in(bytes);
    return load_model(in);
}

void expect_same_model(const ClassModel& a, const ClassModel& b) {
    EXPECT_EQ(a.kernel(), b.kernel());
    EXPECT_EQ(a.train_set(), b.train_set());
    EXPECT_EQ(a.V(), b.V());
    EXPECT_EQ(a.sigma(), b.sigma());
    EXPECT_EQ(a.H(), b.H());
    EXPECT_EQ(a.eigen_threshold_rel(), b.eigen_threshold_rel());
}

}  // namespace

TEST(ModelIo, ClassifierRoundTripIsBitExact) {
    for (const KernelSpec& k : {KernelSpec{PolynomialKernel{2}}, KernelSpec{GaussianKernel{0.75}},
                                KernelSpec{LogisticMapKernel{}},
                                KernelSpec{TruncatedLogisticKernel{9}}}) {
        const DynafitClassifier c = two_class(k, 1);
        const std::string bytes = serialize(c);
        const ModelFile back = parse(bytes);
        ASSERT_TRUE(std::holds_alternative<DynafitClassifier>(back));
        const auto& d = std::get<DynafitClassifier>(back);
        ASSERT_EQ(d.labels(), c.labels());
        for (std::size_t i = 0; i < c.size(); ++i)
            expect_same_model(c.classes()[i].model, d.classes()[i].model);
        EXPECT_EQ(serialize(d), bytes);
    }
}

TEST(ModelIo, OneClassRoundTrip) {
    std::mt19937_64 rng(2);
    const auto set = random_set(rng, 6, 1, 4, 0.0, 0.9);
    const OneClassDetector det{fit_class_model(LogisticMapKernel{}, set), 0.125};
    const ModelFile back = parse(serialize(det));
    ASSERT_TRUE(std::holds_alternative<OneClassDetector>(back));
    const auto& d = std::get<OneClassDetector>(back);
    EXPECT_EQ(d.threshold, 0.125);
    expect_same_model(d.model, det.model);
}

TEST(ModelIo, HeaderIsSelfDescribing) {
    const std::string bytes = serialize(two_class(LogisticMapKernel{}, 3));
    const std::string header = bytes.substr(0, bytes.find('\n'));
    EXPECT_NE(header.find("\"format_name\":\"dynafit-model\""), std::string::npos);
    EXPECT_NE(header.find("\"version\":1"), std::string::npos);
    EXPECT_NE(header.find("\"kind\":\"classifier\""), std::string::npos);
}

TEST(ModelIo, UnknownVersion) {
    std::string bytes = serialize(two_class(LogisticMapKernel{}, 4));
    const auto pos = bytes.find("\"version\":1");
    ASSERT_NE(pos, std::string::npos);
    bytes[pos + 10] = '7';
    EXPECT_THROW(parse(bytes), VersionError);
}

TEST(ModelIo, TruncatedFile) {
    const std::string bytes = serialize(two_class(LogisticMapKernel{}, 5));
    for (std::size_t cut : {std::size_t{0}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1})
        EXPECT_THROW(parse(bytes.substr(0, cut)), FormatError) << cut;
}

TEST(ModelIo, CorruptedPayload) {
    std::string bytes = serialize(two_class(LogisticMapKernel{}, 6));
    bytes[bytes.find('\n') + 40] ^= 0x10;
    EXPECT_THROW(parse(bytes), ChecksumError);
}

TEST(ModelIo, NotAModelFile) {
    EXPECT_THROW(parse("hello\n"), FormatError);
    EXPECT_THROW(parse("{\"format_name\":\"other\",\"version\":1}\n"), FormatError);
}

TEST(ModelIo, LoadedModelPredictsIdentically) {
    const DynafitClassifier c = two_class(GaussianKernel{1.0}, 7);
    const ModelFile back = parse(serialize(c));
    const auto& d = std::get<DynafitClassifier>(back);
    std::mt19937_64 rng(70);
    const auto probe = random_set(rng, 10, 1, 3, 0.0, 0.9);
    const auto a = classify(c, probe);
    const auto b = classify(d, probe);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].label, b[i].label);
        EXPECT_EQ(a[i].distances, b[i].distances);
    }
}
