#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fundus/error.hpp"

namespace fundus::topicmodel {

inline constexpr double kSmoothing = 1e-12;

/// Document-word count matrix n(d, w), row-major by document.
class Corpus {
public:
  Corpus() = default;
  Corpus(std::size_t n_docs, std::size_t n_words, std::vector<double> counts, std::vector<int> labels = {})
      : n_docs_(n_docs), n_words_(n_words), counts_(std::move(counts)), labels_(std::move(labels)) {
    if (n_docs_ == 0 || n_words_ == 0) throw invalid_input("corpus: empty corpus");
    if (counts_.size() != n_docs_ * n_words_) throw invalid_input("corpus: count matrix has wrong size");
    if (!labels_.empty() && labels_.size() != n_docs_) throw invalid_input("corpus: one label per document required");
    for (std::size_t d = 0; d < n_docs_; ++d) {
      double row = 0.0;
      for (double v : doc(d)) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw invalid_input("corpus: counts must be finite and nonnegative");
        row += v;
      }
      if (!(row > 0.0)) throw invalid_input("corpus: document " + std::to_string(d) + " is empty");
    }
  }

  std::size_t docs() const { return n_docs_; }
  std::size_t words() const { return n_words_; }
  double count(std::size_t d, std::size_t w) const { return counts_[d * n_words_ + w]; }
  std::span<const double> doc(std::size_t d) const {
    return std::span<const double>(counts_).subspan(d * n_words_, n_words_);
  }
  const std::vector<int>& labels() const { return labels_; }
  double total() const { return std::accumulate(counts_.begin(), counts_.end(), 0.0); }

private:
  std::size_t n_docs_ = 0;
  std::size_t n_words_ = 0;
  std::vector<double> counts_;
  std::vector<int> labels_;
};

/// P(z), P(w|z) (topics × words) and P(d|z) (topics × documents).
struct PlsaModel {
  std::size_t n_topics = 0;
  std::size_t n_words = 0;
  std::size_t n_docs = 0;
  std::vector<double> p_z;
  std::vector<double> p_w_given_z;
  std::vector<double> p_d_given_z;
  std::vector<double> log_likelihood_trace;

  double pw(std::size_t z, std::size_t w) const { return p_w_given_z[z * n_words + w]; }
  double pd(std::size_t z, std::size_t d) const { return p_d_given_z[z * n_docs + d]; }

  /// Training-document topic mixture P(z|d) ∝ P(z) P(d|z).
  std::vector<double> topics_of_document(std::size_t d) const {
    std::vector<double> t(n_topics);
    for (std::size_t z = 0; z < n_topics; ++z) t[z] = p_z[z] * pd(z, d);
    const double s = std::accumulate(t.begin(), t.end(), 0.0);
    for (double& v : t) v = s > 0.0 ? v / s : 1.0 / static_cast<double>(n_topics);
    return t;
  }
};

struct PlsaOptions {
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;  // relative log-likelihood improvement
};

namespace detail {

/// Responsibilities are stored per (d, w) pair as n_topics consecutive values.
using Posteriors = std::vector<double>;

inline void m_step(const Corpus& c, const Posteriors& post, PlsaModel& m) {
  const std::size_t Z = m.n_topics, W = c.words(), N = c.docs();
  std::fill(m.p_w_given_z.begin(), m.p_w_given_z.end(), 0.0);
  std::fill(m.p_d_given_z.begin(), m.p_d_given_z.end(), 0.0);
  std::vector<double> mass(Z, 0.0);
  for (std::size_t d = 0; d < N; ++d)
    for (std::size_t w = 0; w < W; ++w) {
      const double n = c.count(d, w);
      if (n == 0.0) continue;
      const double* r = &post[(d * W + w) * Z];
      for (std::size_t z = 0; z < Z; ++z) {
        const double v = n * r[z];
        m.p_w_given_z[z * W + w] += v;
        m.p_d_given_z[z * N + d] += v;
        mass[z] += v;
      }
    }
  const double R = c.total();
  for (std::size_t z = 0; z < Z; ++z) {
    const bool dead = !(mass[z] > kSmoothing);
    for (std::size_t w = 0; w < W; ++w)
      m.p_w_given_z[z * W + w] = dead ? 1.0 / W : m.p_w_given_z[z * W + w] / mass[z];
    for (std::size_t d = 0; d < N; ++d)
      m.p_d_given_z[z * N + d] = dead ? 1.0 / N : m.p_d_given_z[z * N + d] / mass[z];
    m.p_z[z] = mass[z] / R;
  }
}

inline void e_step(const Corpus& c, const PlsaModel& m, Posteriors& post) {
  const std::size_t Z = m.n_topics, W = c.words();
  for (std::size_t d = 0; d < c.docs(); ++d)
    for (std::size_t w = 0; w < W; ++w) {
      if (c.count(d, w) == 0.0) continue;
      double* r = &post[(d * W + w) * Z];
      double den = 0.0;
      for (std::size_t z = 0; z < Z; ++z) {
        r[z] = m.p_z[z] * m.pd(z, d) * m.pw(z, w);
        den += r[z];
      }
      for (std::size_t z = 0; z < Z; ++z) r[z] = den > kSmoothing * kSmoothing ? r[z] / den : 1.0 / Z;
    }
}

inline std::uint64_t hash_row(std::span<const double> row) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : row) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xFF;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace detail

inline double log_likelihood(const Corpus& c, const PlsaModel& m) {
  double ll = 0.0;
  for (std::size_t d = 0; d < c.docs(); ++d)
    for (std::size_t w = 0; w < c.words(); ++w) {
      const double n = c.count(d, w);
      if (n == 0.0) continue;
      double p = 0.0;
      for (std::size_t z = 0; z < m.n_topics; ++z) p += m.p_z[z] * m.pd(z, d) * m.pw(z, w);
      ll += n * std::log(std::max(p, kSmoothing * kSmoothing));
    }
  return ll;
}

/// EM from explicit initial responsibilities P(z|d,w), laid out
/// [(d * words + w) * n_topics + z]. The first M-step consumes them.
inline PlsaModel train_plsa_from(const Corpus& corpus, std::size_t n_topics, std::vector<double> initial,
                                 const PlsaOptions& opt = {}) {
  if (n_topics < 1) throw invalid_input("train_plsa: need at least one topic");
  if (corpus.docs() == 0) throw invalid_input("train_plsa: empty corpus");
  if (initial.size() != corpus.docs() * corpus.words() * n_topics)
    throw invalid_input("train_plsa: initial responsibilities have the wrong size");

  PlsaModel m;
  m.n_topics = n_topics;
  m.n_words = corpus.words();
  m.n_docs = corpus.docs();
  m.p_z.assign(n_topics, 0.0);
  m.p_w_given_z.assign(n_topics * m.n_words, 0.0);
  m.p_d_given_z.assign(n_topics * m.n_docs, 0.0);

  detail::Posteriors post = std::move(initial);
  detail::m_step(corpus, post, m);
  double prev = log_likelihood(corpus, m);
  m.log_likelihood_trace.push_back(prev);
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    detail::e_step(corpus, m, post);
    detail::m_step(corpus, post, m);
    const double ll = log_likelihood(corpus, m);
    m.log_likelihood_trace.push_back(ll);
    const bool converged = (ll - prev) <= opt.tolerance * std::abs(prev);
    prev = ll;
    if (converged) break;
  }
  return m;
}

/// Random initial responsibilities; each document draws from a generator
/// keyed on the seed and its own counts, so the draw follows the document if
/// the corpus is reordered.
inline std::vector<double> random_responsibilities(const Corpus& corpus, std::size_t n_topics, std::uint64_t seed) {
  std::vector<double> out(corpus.docs() * corpus.words() * n_topics, 0.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t d = 0; d < corpus.docs(); ++d) {
    std::mt19937_64 rng(seed ^ detail::hash_row(corpus.doc(d)));
    for (std::size_t w = 0; w < corpus.words(); ++w) {
      double* r = &out[(d * corpus.words() + w) * n_topics];
      double s = 0.0;
      for (std::size_t z = 0; z < n_topics; ++z) s += (r[z] = 0.05 + unit(rng));
      for (std::size_t z = 0; z < n_topics; ++z) r[z] /= s;
    }
  }
  return out;
}

inline PlsaModel train_plsa(const Corpus& corpus, std::size_t n_topics, std::uint64_t seed,
                            const PlsaOptions& opt = {}) {
  if (n_topics < 1) throw invalid_input("train_plsa: need at least one topic");
  return train_plsa_from(corpus, n_topics, random_responsibilities(corpus, n_topics, seed), opt);
}

struct FoldIn {
  std::vector<double> topics;  // P(z | d_test)
  bool unseen_vocabulary = false;
};

/// EM over P(z|d_test) with P(w|z) frozen, starting from the uniform mixture.
inline FoldIn fold_in(std::span<const double> doc, const PlsaModel& m, std::size_t max_iterations = 200,
                      double tolerance = 1e-10) {
  if (doc.size() != m.n_words) throw invalid_input("fold_in: document length differs from vocabulary");
  const std::size_t Z = m.n_topics;
  FoldIn out{std::vector<double>(Z, 1.0 / static_cast<double>(Z)), false};

  std::vector<std::size_t> words;
  for (std::size_t w = 0; w < doc.size(); ++w) {
    if (doc[w] < 0.0) throw invalid_input("fold_in: negative count");
    if (doc[w] == 0.0) continue;
    bool seen = false;
    for (std::size_t z = 0; z < Z && !seen; ++z) seen = m.pw(z, w) > 0.0;
    if (seen) words.push_back(w);
  }
  if (words.empty()) {
    out.unseen_vocabulary = true;
    return out;
  }

  std::vector<double> acc(Z), r(Z);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t w : words) {
      double den = 0.0;
      for (std::size_t z = 0; z < Z; ++z) den += (r[z] = out.topics[z] * m.pw(z, w));
      if (!(den > 0.0)) continue;
      for (std::size_t z = 0; z < Z; ++z) acc[z] += doc[w] * r[z] / den;
    }
    const double s = std::accumulate(acc.begin(), acc.end(), 0.0);
    double change = 0.0;
    for (std::size_t z = 0; z < Z; ++z) {
      const double next = acc[z] / s;
      change += std::abs(next - out.topics[z]);
      out.topics[z] = next;
    }
    if (change < tolerance) break;
  }
  return out;
}

}  // namespace fundus::topicmodel
