#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "fundus/descriptors/hog.hpp"
#include "fundus/encoding/codebook.hpp"
#include "fundus/encoding/kmeans.hpp"
#include "fundus/encoding/llc.hpp"

using namespace fundus;
using namespace fundus::encoding;

namespace {

Codebook random_codebook(int m, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd b(dim, m);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = std::normal_distribution<double>(0, 1)(rng);
  return Codebook(b);
}

std::vector<double> random_vector(int dim, std::mt19937_64& rng) {
  std::vector<double> x(dim);
  for (double& v : x) v = std::normal_distribution<double>(0, 1)(rng);
  return x;
}

std::vector<int> nearest(const std::vector<double>& x, const Codebook& cb, int k) {
  std::vector<std::pair<double, int>> d;
  for (int j = 0; j < cb.size(); ++j) {
    double s = 0;
    for (int i = 0; i < cb.dim(); ++i) s += (x[i] - cb.bases()(i, j)) * (x[i] - cb.bases()(i, j));
    d.push_back({s, j});
  }
  std::sort(d.begin(), d.end());
  std::vector<int> out;
  for (int i = 0; i < k; ++i) out.push_back(d[i].second);
  return out;
}

}  // namespace

TEST(Llc, CodesSumToOneAndBeatUniformWeights) {
  std::mt19937_64 rng(21);
  const Codebook cb = random_codebook(20, 8, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = random_vector(8, rng);
    const LlcCode code = llc_encode(x, cb, 5);
    EXPECT_NEAR(std::accumulate(code.coefficients.begin(), code.coefficients.end(), 0.0), 1.0, 1e-9);
    std::vector<double> uniform(20, 0.0);
    for (int j : nearest(x, cb, 5)) uniform[j] = 0.2;
    for (int j = 0; j < 20; ++j)
      if (uniform[j] == 0.0) {
        EXPECT_EQ(code.coefficients[j], 0.0);
      }
    EXPECT_LE(reconstruction_error(x, cb, code.coefficients), reconstruction_error(x, cb, uniform) + 1e-12);
  }
}

TEST(Llc, BasisVectorEncodesToOneHot) {
  const Codebook cb = random_codebook(16, 6, 8);
  for (int j = 0; j < cb.size(); ++j) {
    std::vector<double> x(cb.bases().col(j).data(), cb.bases().col(j).data() + cb.dim());
    const LlcCode code = llc_encode(x, cb, 5);
    for (int i = 0; i < cb.size(); ++i) EXPECT_NEAR(code.coefficients[i], i == j ? 1.0 : 0.0, 1e-9);
  }
}

TEST(Llc, ExactSolverSumsToOne) {
  std::mt19937_64 rng(4);
  const Codebook cb = random_codebook(12, 5, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto code = llc_encode_exact(random_vector(5, rng), cb);
    EXPECT_NEAR(std::accumulate(code.coefficients.begin(), code.coefficients.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(Llc, RejectsBadArguments) {
  const Codebook cb = random_codebook(4, 3, 1);
  EXPECT_THROW(llc_encode(std::vector<double>{1, 2}, cb), Error);
  EXPECT_THROW(llc_encode(std::vector<double>{1, 2, 3}, cb, 5), Error);
  EXPECT_THROW(llc_encode(std::vector<double>{1, 2, 3}, cb, 0), Error);
}

TEST(Llc, WindowHistogramIsNonNegative) {
  std::mt19937_64 rng(6);
  imaging::Raster w(descriptors::kWindowCols, descriptors::kWindowRows, 1);
  for (double& v : w.data()) v = std::uniform_real_distribution<double>(0, 1)(rng);
  const auto desc = descriptors::hog(w);
  const Codebook cb = random_codebook(30, descriptors::kBlockDim, 5);
  const BowHistogram h = encode_window(desc, cb);
  EXPECT_EQ(h.counts.size(), 30u);
  for (double v : h.counts) EXPECT_GE(v, 0.0);
  EXPECT_NEAR(h.total, std::accumulate(h.counts.begin(), h.counts.end(), 0.0), 1e-9);
  EXPECT_GE(h.total, static_cast<double>(desc.block_count()) - 1e-6);
}

TEST(Codebook, RejectsCoincidentBases) {
  Eigen::MatrixXd b(2, 3);
  b << 0, 1, 0, 0, 1, 0;
  EXPECT_THROW(Codebook{b}, Error);
  EXPECT_THROW(Codebook(Eigen::MatrixXd::Zero(2, 1)), Error);
}

TEST(Codebook, BinaryRoundTrip) {
  const Codebook cb(random_codebook(7, 4, 9).bases(), 0.5, 0.01);
  std::stringstream ss;
  write_codebook(ss, cb);
  EXPECT_EQ(ss.str().substr(0, 4), "FLCB");
  EXPECT_EQ(read_codebook(ss), cb);
}

TEST(Codebook, RejectsCorruptFiles) {
  std::stringstream bad("XXXX\x01\x00\x00\x00");
  EXPECT_THROW(read_codebook(bad), Error);
  std::stringstream ss;
  write_codebook(ss, random_codebook(3, 2, 1));
  std::stringstream cut(ss.str().substr(0, ss.str().size() - 5));
  EXPECT_THROW(read_codebook(cut), Error);
}

TEST(KMeans, RecoversSeparatedClusters) {
  std::mt19937_64 rng(12);
  const double centres[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  Eigen::MatrixXd x(2, 300);
  for (int i = 0; i < 300; ++i)
    for (int d = 0; d < 2; ++d) x(d, i) = centres[i % 3][d] + std::normal_distribution<double>(0, 0.3)(rng);
  const Codebook cb = learn_codebook(x, 3, 1);
  for (const auto& c : centres) {
    double best = 1e9;
    for (int j = 0; j < 3; ++j) best = std::min(best, std::hypot(cb.bases()(0, j) - c[0], cb.bases()(1, j) - c[1]));
    EXPECT_LT(best, 0.2);
  }
}

TEST(KMeans, DeterministicForSeed) {
  std::mt19937_64 rng(2);
  Eigen::MatrixXd x(3, 200);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = std::uniform_real_distribution<double>(0, 1)(rng);
  EXPECT_EQ(learn_codebook(x, 8, 5), learn_codebook(x, 8, 5));
}

TEST(KMeans, NeedsEnoughDistinctSamples) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 50);
  x(0, 0) = 2;
  EXPECT_THROW(learn_codebook(x, 3, 1), Error);
  EXPECT_THROW(learn_codebook(x, 1, 1), Error);
}
