#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgpcl/dgp.hpp"
#include "dgpcl/gp.hpp"
#include "dgpcl/mcmc.hpp"

namespace dgpcl {

// Little-endian binary sections with a magic/version header per blob.
// Doubles are written bit-for-bit so reload is exact.
namespace bin {

inline void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("checkpoint: truncated stream (u64)");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline void write_i64(std::ostream& os, std::int64_t v) {
  write_u64(os, static_cast<std::uint64_t>(v));
}

inline std::int64_t read_i64(std::istream& is) {
  return static_cast<std::int64_t>(read_u64(is));
}

inline void write_double(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(os, bits);
}

inline double read_double(std::istream& is) {
  const std::uint64_t bits = read_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is) {
  const std::uint64_t len = read_u64(is);
  if (len > (1ull << 30)) throw std::runtime_error("checkpoint: implausible string length");
  std::string s(len, '\0');
  is.read(s.data(), static_cast<std::streamsize>(len));
  if (!is) throw std::runtime_error("checkpoint: truncated stream (string)");
  return s;
}

inline void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  write_i64(os, m.rows());
  write_i64(os, m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) write_double(os, m(i, j));
  }
}

inline Eigen::MatrixXd read_matrix(std::istream& is) {
  const Eigen::Index rows = read_i64(is);
  const Eigen::Index cols = read_i64(is);
  if (rows < 0 || cols < 0 || rows * cols > (1ll << 28))
    throw std::runtime_error("checkpoint: implausible matrix shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = read_double(is);
  }
  return m;
}

inline void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
  write_matrix(os, v);
}

inline Eigen::VectorXd read_vector(std::istream& is) {
  const Eigen::MatrixXd m = read_matrix(is);
  if (m.cols() > 1) throw std::runtime_error("checkpoint: expected a column vector");
  return m.col(0);
}

inline void expect_magic(std::istream& is, const std::string& magic, std::uint64_t version) {
  const std::string got = read_string(is);
  if (got != magic) throw std::runtime_error("checkpoint: bad magic, expected " + magic);
  const std::uint64_t ver = read_u64(is);
  if (ver != version)
    throw std::runtime_error("checkpoint: unsupported " + magic + " version " +
                             std::to_string(ver));
}

}  // namespace bin

inline void save_kernel_hyper(std::ostream& os, const KernelHyper& h) {
  bin::write_vector(os, h.theta);
  bin::write_double(os, h.tau2);
  bin::write_double(os, h.eta);
}

inline KernelHyper load_kernel_hyper(std::istream& is) {
  KernelHyper h;
  h.theta = bin::read_vector(is);
  h.tau2 = bin::read_double(is);
  h.eta = bin::read_double(is);
  return h;
}

inline void save_adapt_state(std::ostream& os, const MhAdaptState& a) {
  bin::write_vector(os, a.step);
  bin::write_u64(os, a.window_proposals.size());
  for (std::size_t i = 0; i < a.window_proposals.size(); ++i) {
    bin::write_i64(os, a.window_proposals[i]);
    bin::write_i64(os, a.window_accepts[i]);
    bin::write_i64(os, a.total_proposals[i]);
    bin::write_i64(os, a.total_accepts[i]);
  }
}

inline MhAdaptState load_adapt_state(std::istream& is) {
  MhAdaptState a;
  a.step = bin::read_vector(is);
  const std::uint64_t n = bin::read_u64(is);
  if (n != static_cast<std::uint64_t>(a.step.size()))
    throw std::runtime_error("checkpoint: adapt-state size mismatch");
  a.window_proposals.resize(n);
  a.window_accepts.resize(n);
  a.total_proposals.resize(n);
  a.total_accepts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.window_proposals[i] = static_cast<int>(bin::read_i64(is));
    a.window_accepts[i] = static_cast<int>(bin::read_i64(is));
    a.total_proposals[i] = bin::read_i64(is);
    a.total_accepts[i] = bin::read_i64(is);
  }
  return a;
}

// Retained-chain dump: versioned, bit-exact round trip.
inline void save_dgp_chain(std::ostream& os, const std::vector<DgpSample>& chain) {
  bin::write_string(os, "DGPCHAIN");
  bin::write_u64(os, 1);
  bin::write_u64(os, chain.size());
  for (const DgpSample& s : chain) {
    bin::write_matrix(os, s.w);
    bin::write_u64(os, s.inner_hyp.size());
    for (const KernelHyper& h : s.inner_hyp) save_kernel_hyper(os, h);
    save_kernel_hyper(os, s.outer_hyp);
  }
}

inline std::vector<DgpSample> load_dgp_chain(std::istream& is) {
  bin::expect_magic(is, "DGPCHAIN", 1);
  const std::uint64_t count = bin::read_u64(is);
  std::vector<DgpSample> chain;
  chain.reserve(count);
  for (std::uint64_t t = 0; t < count; ++t) {
    DgpSample s;
    s.w = bin::read_matrix(is);
    const std::uint64_t p = bin::read_u64(is);
    s.inner_hyp.reserve(p);
    for (std::uint64_t i = 0; i < p; ++i) s.inner_hyp.push_back(load_kernel_hyper(is));
    s.outer_hyp = load_kernel_hyper(is);
    chain.push_back(std::move(s));
  }
  return chain;
}

inline void save_dgp_fit(std::ostream& os, const DgpFit& fit) {
  bin::write_string(os, "DGPFIT");
  bin::write_u64(os, 1);
  bin::write_matrix(os, fit.data.x);
  bin::write_vector(os, fit.data.y);
  bin::write_i64(os, fit.p);
  bin::write_double(os, fit.opt.eta);
  bin::write_double(os, fit.opt.theta_init);
  bin::write_i64(os, fit.thin);
  bin::write_matrix(os, fit.w);
  bin::write_u64(os, fit.inner_theta.size());
  for (const auto& th : fit.inner_theta) bin::write_vector(os, th);
  bin::write_vector(os, fit.outer_theta);
  bin::write_u64(os, fit.inner_adapt.size());
  for (const auto& a : fit.inner_adapt) save_adapt_state(os, a);
  save_adapt_state(os, fit.outer_adapt);
  save_dgp_chain(os, fit.chain);
}

inline DgpFit load_dgp_fit(std::istream& is) {
  bin::expect_magic(is, "DGPFIT", 1);
  DgpFit fit;
  fit.data.x = bin::read_matrix(is);
  fit.data.y = bin::read_vector(is);
  fit.p = static_cast<int>(bin::read_i64(is));
  fit.opt.eta = bin::read_double(is);
  fit.opt.theta_init = bin::read_double(is);
  fit.thin = static_cast<int>(bin::read_i64(is));
  fit.w = bin::read_matrix(is);
  const std::uint64_t p1 = bin::read_u64(is);
  fit.inner_theta.resize(p1);
  for (auto& th : fit.inner_theta) th = bin::read_vector(is);
  fit.outer_theta = bin::read_vector(is);
  const std::uint64_t p2 = bin::read_u64(is);
  fit.inner_adapt.resize(p2);
  for (auto& a : fit.inner_adapt) a = load_adapt_state(is);
  fit.outer_adapt = load_adapt_state(is);
  fit.chain = load_dgp_chain(is);
  return fit;
}

inline void save_hyper_chain(std::ostream& os, const HyperChain& chain) {
  bin::write_string(os, "GPCHAIN");
  bin::write_u64(os, 1);
  bin::write_u64(os, chain.samples.size());
  for (const KernelHyper& h : chain.samples) save_kernel_hyper(os, h);
  bin::write_vector(os, chain.accept_rate);
}

inline HyperChain load_hyper_chain(std::istream& is) {
  bin::expect_magic(is, "GPCHAIN", 1);
  HyperChain chain;
  const std::uint64_t count = bin::read_u64(is);
  chain.samples.reserve(count);
  for (std::uint64_t t = 0; t < count; ++t) chain.samples.push_back(load_kernel_hyper(is));
  chain.accept_rate = bin::read_vector(is);
  return chain;
}

inline void save_gp_surrogate(std::ostream& os, const GpMcmcSurrogate& s) {
  bin::write_string(os, "GPFIT");
  bin::write_u64(os, 1);
  bin::write_matrix(os, s.data().x);
  bin::write_vector(os, s.data().y);
  bin::write_vector(os, s.theta());
  save_adapt_state(os, s.adapt_state());
  save_hyper_chain(os, s.chain());
}

inline GpMcmcSurrogate load_gp_surrogate(std::istream& is, const GpMcmcOptions& opt) {
  bin::expect_magic(is, "GPFIT", 1);
  GpData data;
  data.x = bin::read_matrix(is);
  data.y = bin::read_vector(is);
  Eigen::VectorXd theta = bin::read_vector(is);
  MhAdaptState adapt = load_adapt_state(is);
  HyperChain chain = load_hyper_chain(is);
  return GpMcmcSurrogate::restored(opt, std::move(data), std::move(theta), std::move(adapt),
                                   std::move(chain));
}

}  // namespace dgpcl
