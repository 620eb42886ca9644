#pragma once

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fundus/io/binary.hpp"
#include "fundus/topicmodel/plsa.hpp"

namespace fundus::topicmodel {

inline constexpr char kModelMagic[] = "FLPL";
inline constexpr std::uint32_t kModelVersion = 1;

/// "FLPL", u32 version, u32 topics, u32 words, u32 docs, then f64 P(z),
/// P(w|z) (topic-major), P(d|z) (topic-major); all little-endian.
inline void write_model(std::ostream& os, const PlsaModel& m) {
  io::BinaryWriter w(os);
  w.magic(kModelMagic);
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(m.n_topics));
  w.u32(static_cast<std::uint32_t>(m.n_words));
  w.u32(static_cast<std::uint32_t>(m.n_docs));
  w.f64s(m.p_z);
  w.f64s(m.p_w_given_z);
  w.f64s(m.p_d_given_z);
}

inline PlsaModel read_model(std::istream& is, const std::string& source = "model") {
  io::BinaryReader r(is, source);
  r.expect_magic(kModelMagic);
  const auto version = r.u32();
  if (version != kModelVersion) throw format_error(source + ": unsupported model version " + std::to_string(version));
  PlsaModel m;
  m.n_topics = r.bounded_u32("topics", 1u << 12);
  m.n_words = r.bounded_u32("words", 1u << 16);
  m.n_docs = r.bounded_u32("docs", 1u << 24);
  if (m.n_topics == 0 || m.n_words == 0) throw format_error(source + ": empty model");
  m.p_z = r.f64s(m.n_topics);
  m.p_w_given_z = r.f64s(m.n_topics * m.n_words);
  m.p_d_given_z = r.f64s(m.n_topics * m.n_docs);
  return m;
}

inline void save_model(const std::string& path, const PlsaModel& m) {
  auto os = io::open_for_write(path);
  write_model(os, m);
  if (!os) throw io_error("failed writing " + path);
}

inline PlsaModel load_model(const std::string& path) {
  auto is = io::open_for_read(path);
  return read_model(is, path);
}

/// Human-readable sidecar: "iteration,log_likelihood" rows.
inline void save_trace_csv(const std::string& path, const PlsaModel& m) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot open " + path + " for writing");
  os << "iteration,log_likelihood\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < m.log_likelihood_trace.size(); ++i) os << i << ',' << m.log_likelihood_trace[i] << '\n';
}

}  // namespace fundus::topicmodel
