#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "fundus/topicmodel/plsa.hpp"
#include "fundus/topicmodel/plsa_io.hpp"
#include "support/oracles.hpp"

using namespace fundus;
using namespace fundus::topicmodel;

namespace {

constexpr int kFixedIterations = 25;

// Two documents, three words, two topics.
const std::vector<std::vector<double>> kCounts = {{4, 1, 0}, {1, 2, 5}};

std::vector<std::vector<std::vector<double>>> fixed_responsibilities() {
  std::vector<std::vector<std::vector<double>>> r(2, std::vector<std::vector<double>>(3));
  for (int d = 0; d < 2; ++d)
    for (int w = 0; w < 3; ++w) {
      const double a = 0.2 + 0.15 * d + 0.1 * w;
      r[d][w] = {a, 1.0 - a};
    }
  return r;
}

std::vector<double> flatten(const std::vector<std::vector<std::vector<double>>>& r) {
  std::vector<double> out;
  for (const auto& d : r)
    for (const auto& w : d) out.insert(out.end(), w.begin(), w.end());
  return out;
}

Corpus fixed_corpus() {
  std::vector<double> flat;
  for (const auto& row : kCounts) flat.insert(flat.end(), row.begin(), row.end());
  return Corpus(2, 3, flat);
}

PlsaOptions exact_iterations(std::size_t n) {
  PlsaOptions o;
  o.max_iterations = n;
  o.tolerance = -1.0;  // never converges early
  return o;
}

Corpus random_corpus(std::mt19937_64& rng) {
  const std::size_t D = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
  const std::size_t W = std::uniform_int_distribution<std::size_t>(2, 20)(rng);
  std::vector<double> counts(D * W, 0.0);
  std::uniform_int_distribution<int> c(0, 6);
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t w = 0; w < W; ++w) counts[d * W + w] = std::bernoulli_distribution(0.6)(rng) ? c(rng) : 0;
    counts[d * W + std::uniform_int_distribution<std::size_t>(0, W - 1)(rng)] += 1;
  }
  return Corpus(D, W, counts);
}

void expect_normalized(const PlsaModel& m, double tol) {
  EXPECT_NEAR(std::accumulate(m.p_z.begin(), m.p_z.end(), 0.0), 1.0, tol);
  for (std::size_t z = 0; z < m.n_topics; ++z) {
    double sw = 0, sd = 0;
    for (std::size_t w = 0; w < m.n_words; ++w) sw += m.pw(z, w);
    for (std::size_t d = 0; d < m.n_docs; ++d) sd += m.pd(z, d);
    EXPECT_NEAR(sw, 1.0, tol);
    EXPECT_NEAR(sd, 1.0, tol);
  }
}

}  // namespace

TEST(Plsa, FixedInstanceMatchesOracle) {
  const auto want = oracle::plsa_em(kCounts, fixed_responsibilities(), kFixedIterations);
  const PlsaModel m = train_plsa_from(fixed_corpus(), 2, flatten(fixed_responsibilities()),
                                      exact_iterations(kFixedIterations));
  ASSERT_EQ(m.log_likelihood_trace.size(), want.trace.size());
  for (std::size_t i = 0; i < want.trace.size(); ++i) EXPECT_NEAR(m.log_likelihood_trace[i], want.trace[i], 1e-9);
  for (std::size_t z = 0; z < 2; ++z) {
    EXPECT_NEAR(m.p_z[z], want.pz[z], 1e-9);
    for (std::size_t w = 0; w < 3; ++w) EXPECT_NEAR(m.pw(z, w), want.pwz[z][w], 1e-9);
    for (std::size_t d = 0; d < 2; ++d) EXPECT_NEAR(m.pd(z, d), want.pdz[z][d], 1e-9);
  }
}

TEST(Plsa, FixedInstanceFrozenLikelihood) {
  // Produced by the oracle EM above and frozen here.
  const PlsaModel m = train_plsa_from(fixed_corpus(), 2, flatten(fixed_responsibilities()),
                                      exact_iterations(kFixedIterations));
  EXPECT_NEAR(m.log_likelihood_trace.front(), -21.902779854141681, 1e-9);
  EXPECT_NEAR(m.log_likelihood_trace.back(), -18.365680279230038, 1e-9);
}

TEST(Plsa, LikelihoodNeverDecreasesOnRandomCorpora) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Corpus c = random_corpus(rng);
    const std::size_t Z = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    const PlsaModel m = train_plsa(c, Z, trial, exact_iterations(60));
    for (std::size_t i = 1; i < m.log_likelihood_trace.size(); ++i)
      ASSERT_GE(m.log_likelihood_trace[i], m.log_likelihood_trace[i - 1] - 1e-9) << "trial " << trial << " step " << i;
    expect_normalized(m, 1e-9);
  }
}

TEST(Plsa, SingleTopicIsTheUnigramModel) {
  const PlsaModel m = train_plsa(fixed_corpus(), 1, 3);
  EXPECT_NEAR(m.pw(0, 0), 5.0 / 13.0, 1e-12);
  EXPECT_NEAR(m.pw(0, 2), 5.0 / 13.0, 1e-12);
  EXPECT_NEAR(m.pd(0, 1), 8.0 / 13.0, 1e-12);
}

TEST(Plsa, DeterministicAndOrderFollowing) {
  const Corpus c = fixed_corpus();
  const PlsaModel a = train_plsa(c, 2, 99), b = train_plsa(c, 2, 99);
  EXPECT_EQ(a.p_w_given_z, b.p_w_given_z);
  EXPECT_EQ(a.log_likelihood_trace, b.log_likelihood_trace);
}

TEST(Plsa, DefaultStopsOnRelativeTolerance) {
  const PlsaModel m = train_plsa(fixed_corpus(), 2, 5);
  EXPECT_LT(m.log_likelihood_trace.size(), 502u);
}

TEST(Plsa, RejectsBadCorpora) {
  EXPECT_THROW(Corpus(0, 3, {}), Error);
  EXPECT_THROW(Corpus(1, 3, {1, 2}), Error);
  EXPECT_THROW(Corpus(2, 2, {1, 0, 0, 0}), Error);
  EXPECT_THROW(Corpus(1, 2, {1, -1}), Error);
  EXPECT_THROW(train_plsa(fixed_corpus(), 0, 1), Error);
}

TEST(FoldIn, RecoversTrainingMixture) {
  const PlsaModel m = train_plsa_from(fixed_corpus(), 2, flatten(fixed_responsibilities()), exact_iterations(200));
  for (std::size_t d = 0; d < 2; ++d) {
    const auto folded = fold_in(fixed_corpus().doc(d), m, 2000, 1e-14);
    const auto want = m.topics_of_document(d);
    EXPECT_NEAR(std::accumulate(folded.topics.begin(), folded.topics.end(), 0.0), 1.0, 1e-12);
    for (std::size_t z = 0; z < 2; ++z) EXPECT_NEAR(folded.topics[z], want[z], 1e-4);
  }
}

TEST(FoldIn, UnseenVocabularyGivesUniform) {
  PlsaModel m = train_plsa(fixed_corpus(), 2, 1);
  for (std::size_t z = 0; z < 2; ++z) {
    m.p_w_given_z[z * 3 + 2] += m.p_w_given_z[z * 3 + 0];
    m.p_w_given_z[z * 3 + 0] = 0.0;
  }
  const auto f = fold_in(std::vector<double>{3, 0, 0}, m);
  EXPECT_TRUE(f.unseen_vocabulary);
  EXPECT_EQ(f.topics, (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(fold_in(std::vector<double>{1, 1}, m), Error);
}

TEST(PlsaIo, RoundTrip) {
  const PlsaModel m = train_plsa(fixed_corpus(), 2, 1);
  std::stringstream ss;
  write_model(ss, m);
  EXPECT_EQ(ss.str().substr(0, 4), "FLPL");
  const PlsaModel r = read_model(ss);
  EXPECT_EQ(r.p_z, m.p_z);
  EXPECT_EQ(r.p_w_given_z, m.p_w_given_z);
  EXPECT_EQ(r.p_d_given_z, m.p_d_given_z);
  EXPECT_EQ(r.n_topics, m.n_topics);
  std::stringstream bad(ss.str().replace(0, 4, "FLCB"));
  EXPECT_THROW(read_model(bad), Error);
}
