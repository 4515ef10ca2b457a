#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "ffmlp/error.hpp"
#include "ffmlp/partition.hpp"
#include "ffmlp/types.hpp"

namespace ffmlp {

// The constructed four-layer perceptron d → 2L → D2 → C.
//
// Stage 1 (W1, b1): rows 2l and 2l+1 hold (w_l, b_l) and (−w_l, −b_l) of hyperplane l.
// Stage 2 (W2): one row per region code; for every plane the l1 neuron on the code's
// side gets weight 1 and its partner gets −P. No bias.
// Stage 3 (W3): column r is one-hot on the majority class of region r. No bias.
struct FFNetwork {
  Index input_dim = 0;
  int class_count = 0;
  double P = 1000.0;
  HyperplaneSet planes;
  std::vector<SignCode> code_order;
  std::vector<ClassId> region_class;
  Matrix W1;
  Vector b1;
  Matrix W2;
  Vector b2;
  Matrix W3;
  Vector b3;
  ClassId fallback_class = 0;

  Index D1() const { return W1.rows(); }
  Index D2() const { return W2.rows(); }
};

struct LayerTrace {
  Vector z1, a1, z2, a2, logits;
};

// l1 neuron carrying the positive side of plane l when bit is true.
inline Index l1_slot(std::size_t plane, bool bit) {
  return static_cast<Index>(2 * plane + (bit ? 0 : 1));
}

inline FFNetwork assemble(const HyperplaneSet& hs, const RegionTable& rt, double P, int class_count) {
  if (!(P > 0.0)) throw ParameterError("isolation constant P must be > 0");
  if (hs.size() == 0) throw ParameterError("cannot assemble a network without hyperplanes");
  if (rt.code_length != hs.size())
    throw InternalError("region codes have length " + std::to_string(rt.code_length) + " but there are " +
                        std::to_string(hs.size()) + " hyperplanes");
  if (rt.class_count != class_count) throw InternalError("region table class count mismatch");
  const Index L = static_cast<Index>(hs.size());
  const Index d = hs.dim;
  const Index D2 = static_cast<Index>(rt.size());

  FFNetwork net;
  net.input_dim = d;
  net.class_count = class_count;
  net.P = P;
  net.planes = hs;
  net.W1.resize(2 * L, d);
  net.b1.resize(2 * L);
  for (Index l = 0; l < L; ++l) {
    const auto& h = hs.planes[static_cast<std::size_t>(l)];
    net.W1.row(2 * l) = h.normal.transpose();
    net.W1.row(2 * l + 1) = -h.normal.transpose();
    net.b1(2 * l) = h.bias;
    net.b1(2 * l + 1) = -h.bias;
  }
  net.W2 = Matrix::Zero(D2, 2 * L);
  net.b2 = Vector::Zero(D2);
  net.W3 = Matrix::Zero(class_count, D2);
  net.b3 = Vector::Zero(class_count);
  for (Index r = 0; r < D2; ++r) {
    const auto& entry = rt.entries[static_cast<std::size_t>(r)];
    if (entry.code.size() != static_cast<std::size_t>(L)) throw InternalError("region code length mismatch");
    for (std::size_t l = 0; l < static_cast<std::size_t>(L); ++l) {
      const bool bit = entry.code[l];
      net.W2(r, l1_slot(l, bit)) = 1.0;
      net.W2(r, l1_slot(l, !bit)) = -P;
    }
    net.W3(entry.majority, r) = 1.0;
    net.code_order.push_back(entry.code);
    net.region_class.push_back(entry.majority);
  }
  net.fallback_class = rt.global_majority();
  return net;
}

inline std::pair<Vector, LayerTrace> forward(const FFNetwork& net, const Eigen::Ref<const Vector>& x) {
  if (x.size() != net.input_dim)
    throw ParameterError("network expects dimension " + std::to_string(net.input_dim) + ", got " +
                         std::to_string(x.size()));
  LayerTrace t;
  // Stage 1 rows are evaluated exactly like the hyperplanes themselves, so the sign of
  // z1(2l) always equals the sign bit code_of reports.
  t.z1.resize(net.D1());
  for (std::size_t l = 0; l < net.planes.size(); ++l) {
    const double v = evaluate(net.planes.planes[l], x);
    t.z1(static_cast<Index>(2 * l)) = v;
    t.z1(static_cast<Index>(2 * l + 1)) = -v;
  }
  t.a1 = t.z1.cwiseMax(0.0);
  t.z2 = net.W2 * t.a1 + net.b2;
  t.a2 = t.z2.cwiseMax(0.0);
  t.logits = net.W3 * t.a2 + net.b3;
  Vector logits = t.logits;
  return {std::move(logits), std::move(t)};
}

// Argmax with lowest-index tie-break; all-zero logits (a point in no tabulated region)
// fall back to `fallback_class`.
inline ClassId decide(const Eigen::Ref<const Vector>& logits, ClassId fallback_class) {
  if ((logits.array() == 0.0).all()) return fallback_class;
  Index best = 0;
  for (Index c = 1; c < logits.size(); ++c)
    if (logits(c) > logits(best)) best = c;
  return static_cast<ClassId>(best);
}

inline ClassId predict(const FFNetwork& net, const Eigen::Ref<const Vector>& x, ClassId fallback_class) {
  return decide(forward(net, x).first, fallback_class);
}

inline ClassId predict(const FFNetwork& net, const Eigen::Ref<const Vector>& x) {
  return predict(net, x, net.fallback_class);
}

// Structural invariants of an assembled network; returns a description of every
// violation found (empty when the network is well formed).
inline std::vector<std::string> structural_violations(const FFNetwork& net) {
  std::vector<std::string> out;
  const Index L = static_cast<Index>(net.planes.size());
  const Index D2 = static_cast<Index>(net.code_order.size());
  auto shape = [&](const Matrix& m, Index r, Index c, const char* name) {
    if (m.rows() != r || m.cols() != c)
      out.push_back(std::string(name) + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    ", expected " + std::to_string(r) + "x" + std::to_string(c));
  };
  shape(net.W1, 2 * L, net.input_dim, "W1");
  shape(net.W2, D2, 2 * L, "W2");
  shape(net.W3, net.class_count, D2, "W3");
  if (net.b1.size() != 2 * L) out.push_back("b1 length differs from D1 = 2L");
  if (net.b2.size() != D2) out.push_back("b2 length differs from D2");
  if (net.b3.size() != net.class_count) out.push_back("b3 length differs from class count");
  if (static_cast<Index>(net.region_class.size()) != D2) out.push_back("region_class length differs from D2");
  if (!out.empty()) return out;
  if (!(net.P > 0.0)) out.push_back("P must be positive");
  if (net.fallback_class < 0 || net.fallback_class >= net.class_count) out.push_back("fallback_class out of range");

  for (Index l = 0; l < L; ++l) {
    const auto& h = net.planes.planes[static_cast<std::size_t>(l)];
    if (h.normal.size() != net.input_dim) {
      out.push_back("plane " + std::to_string(l) + " has the wrong dimension");
      continue;
    }
    if (net.W1.row(2 * l) != h.normal.transpose() || net.b1(2 * l) != h.bias)
      out.push_back("W1 row " + std::to_string(2 * l) + " does not match plane " + std::to_string(l));
    if (net.W1.row(2 * l + 1) != -net.W1.row(2 * l) || net.b1(2 * l + 1) != -net.b1(2 * l))
      out.push_back("l1 pair " + std::to_string(l) + " is not antisymmetric");
  }
  for (Index r = 0; r < D2; ++r) {
    const auto& code = net.code_order[static_cast<std::size_t>(r)];
    if (code.size() != static_cast<std::size_t>(L)) {
      out.push_back("code " + std::to_string(r) + " has the wrong length");
      continue;
    }
    if (r > 0 && !(net.code_order[static_cast<std::size_t>(r - 1)] < code))
      out.push_back("code_order is not strictly increasing at " + std::to_string(r));
    for (Index l = 0; l < L; ++l) {
      const bool bit = code[static_cast<std::size_t>(l)];
      if (net.W2(r, l1_slot(static_cast<std::size_t>(l), bit)) != 1.0 ||
          net.W2(r, l1_slot(static_cast<std::size_t>(l), !bit)) != -net.P)
        out.push_back("W2 row " + std::to_string(r) + " does not isolate code " + code.str() + " at plane " +
                      std::to_string(l));
    }
    int ones = 0;
    for (Index c = 0; c < net.class_count; ++c) {
      const double v = net.W3(c, r);
      if (v == 1.0) {
        ++ones;
        if (c != net.region_class[static_cast<std::size_t>(r)]) out.push_back("W3 column " + std::to_string(r) + " points at the wrong class");
      } else if (v != 0.0) {
        out.push_back("W3 entry outside {0, 1} at column " + std::to_string(r));
      }
    }
    if (ones != 1) out.push_back("W3 column " + std::to_string(r) + " is not one-hot");
  }
  if (!(net.b2.array() == 0.0).all()) out.push_back("b2 must be zero");
  if (!(net.b3.array() == 0.0).all()) out.push_back("b3 must be zero");
  if (static_cast<double>(D2) > max_region_count(static_cast<std::size_t>(L), net.input_dim))
    out.push_back("more regions than L hyperplanes can form in this dimension");
  return out;
}

// Whether every competing region neuron is driven negative at x:
//   P · Σ_{l: c'_l ≠ c_l} r_l(x) > Σ_{l: c'_l = c_l} r_l(x)   for all codes c' ≠ c,
// where c is x's own code and r_l(x) = |w_l·x + b_l| is the live response of pair l.
// When it holds and c is tabulated, exactly one l2 neuron fires and the network's
// decision equals the region table's majority for c.
inline bool isolation_holds(const FFNetwork& net, const Eigen::Ref<const Vector>& x) {
  const SignCode code = code_of(net.planes, x);
  const std::size_t L = net.planes.size();
  std::vector<double> response(L);
  for (std::size_t l = 0; l < L; ++l) response[l] = std::abs(evaluate(net.planes.planes[l], x));
  for (const auto& other : net.code_order) {
    if (other == code) continue;
    double match = 0.0;
    double mismatch = 0.0;
    for (std::size_t l = 0; l < L; ++l) (other[l] == code[l] ? match : mismatch) += response[l];
    if (!(net.P * mismatch > match)) return false;
  }
  return true;
}

}  // namespace ffmlp
