#include "turbocs/hmt.hpp"

#include <cmath>
#include <stdexcept>

namespace turbocs {

namespace {

using Pmf = std::array<double, 2>;

Pmf normalized(const Pmf& p) {
  const double s = p[0] + p[1];
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::runtime_error("hmt_decode: message normalization failed (contradictory evidence?)");
  }
  return {p[0] / s, p[1] / s};
}

// transition[parent_state][child_state]
std::array<Pmf, 2> transition_at(const HmtParams& params, int parent_level) {
  const double t11 = params.pi11.at(parent_level);
  const double t00 = params.pi00.at(parent_level);
  return {Pmf{t00, 1.0 - t00}, Pmf{1.0 - t11, t11}};
}

}  // namespace

StateMessages hmt_decode(const QuadTreeIndex& tree, const HmtParams& params,
                         const Eigen::ArrayX2d& d_in) {
  const int n = tree.n_total;
  if (static_cast<int>(d_in.rows()) != n) {
    throw std::invalid_argument("hmt_decode: d_in size mismatch");
  }
  if (tree.n_levels > 1 &&
      (static_cast<int>(params.pi11.size()) < tree.n_levels - 1 ||
       static_cast<int>(params.pi00.size()) < tree.n_levels - 1)) {
    throw std::invalid_argument("hmt_decode: transition arrays shorter than n_levels - 1");
  }

  std::vector<Pmf> d(n);
  for (int i = 0; i < n; ++i) {
    if (!(d_in(i, 0) >= 0.0) || !(d_in(i, 1) >= 0.0) || !std::isfinite(d_in(i, 0)) ||
        !std::isfinite(d_in(i, 1))) {
      throw std::invalid_argument("hmt_decode: invalid pmf entry");
    }
    d[i] = normalized(Pmf{d_in(i, 0), d_in(i, 1)});
  }

  std::vector<Pmf> up(n, Pmf{1.0, 1.0});    // message to parent, indexed by child
  std::vector<Pmf> down(n, Pmf{0.5, 0.5});  // message from parent factor (or root prior)
  std::vector<Pmf> val(n, Pmf{1.0, 1.0});   // d * product of child up-messages

  // Upward sweep, leaves first.
  for (int j = tree.n_levels - 1; j >= 0; --j) {
    for (int node : tree.level_sets[j + 1]) {
      Pmf v = d[node];
      for (int child : tree.children[node]) {
        v[0] *= up[child][0];
        v[1] *= up[child][1];
      }
      val[node] = normalized(v);
      if (j > 0) {
        const auto t = transition_at(params, j - 1);
        up[node] = normalized(Pmf{t[0][0] * val[node][0] + t[0][1] * val[node][1],
                                  t[1][0] * val[node][0] + t[1][1] * val[node][1]});
      }
    }
  }

  StateMessages msgs;
  msgs.d_in.resize(n, 2);
  msgs.h_out.resize(n, 2);
  msgs.posterior.resize(n, 2);

  // Downward sweep with leave-one-out products over siblings; h_out at a node
  // combines its down-message with its children's up-messages, never its own d.
  for (int j = 0; j < tree.n_levels; ++j) {
    for (int node : tree.level_sets[j + 1]) {
      if (j == 0) down[node] = {1.0 - params.pi_root, params.pi_root};
      Pmf h = down[node];
      for (int child : tree.children[node]) {
        h[0] *= up[child][0];
        h[1] *= up[child][1];
      }
      h = normalized(h);
      msgs.h_out(node, 0) = h[0];
      msgs.h_out(node, 1) = h[1];

      const auto& kids = tree.children[node];
      if (!kids.empty()) {
        const auto t = transition_at(params, j);
        const int k = static_cast<int>(kids.size());
        // prefix[i] = product of up-messages of kids[0..i-1]; suffix likewise.
        std::vector<Pmf> prefix(k + 1, Pmf{1.0, 1.0}), suffix(k + 1, Pmf{1.0, 1.0});
        for (int i = 0; i < k; ++i) {
          prefix[i + 1] = {prefix[i][0] * up[kids[i]][0], prefix[i][1] * up[kids[i]][1]};
        }
        for (int i = k - 1; i >= 0; --i) {
          suffix[i] = {suffix[i + 1][0] * up[kids[i]][0], suffix[i + 1][1] * up[kids[i]][1]};
        }
        for (int i = 0; i < k; ++i) {
          const Pmf excl = normalized(Pmf{
              d[node][0] * down[node][0] * prefix[i][0] * suffix[i + 1][0],
              d[node][1] * down[node][1] * prefix[i][1] * suffix[i + 1][1]});
          down[kids[i]] = normalized(Pmf{t[0][0] * excl[0] + t[1][0] * excl[1],
                                         t[0][1] * excl[0] + t[1][1] * excl[1]});
        }
      }
    }
  }

  // Tree-less approximation states: prior pass-through.
  for (int node : tree.level_sets[0]) {
    msgs.h_out(node, 0) = 1.0 - params.pi_approx;
    msgs.h_out(node, 1) = params.pi_approx;
  }

  for (int i = 0; i < n; ++i) {
    msgs.d_in(i, 0) = d[i][0];
    msgs.d_in(i, 1) = d[i][1];
    const Pmf post = normalized(Pmf{msgs.h_out(i, 0) * d[i][0], msgs.h_out(i, 1) * d[i][1]});
    msgs.posterior(i, 0) = post[0];
    msgs.posterior(i, 1) = post[1];
  }
  return msgs;
}

Eigen::ArrayX2d llr_to_pmf(const Eigen::ArrayXd& llr, double llr_clamp) {
  const int n = static_cast<int>(llr.size());
  Eigen::ArrayX2d pmf(n, 2);
  for (int i = 0; i < n; ++i) {
    const double l = llr(i);
    if (std::isnan(l)) throw std::invalid_argument("llr_to_pmf: NaN llr");
    if (std::isinf(l)) {
      pmf(i, 0) = l < 0 ? 1.0 : 0.0;
      pmf(i, 1) = l < 0 ? 0.0 : 1.0;
      continue;
    }
    const double clamped = std::clamp(l, -llr_clamp, llr_clamp);
    if (clamped >= 0.0) {
      const double e = std::exp(-clamped);
      pmf(i, 0) = e / (1.0 + e);
      pmf(i, 1) = 1.0 / (1.0 + e);
    } else {
      const double e = std::exp(clamped);
      pmf(i, 0) = 1.0 / (1.0 + e);
      pmf(i, 1) = e / (1.0 + e);
    }
  }
  return pmf;
}

Eigen::ArrayXd pmf_to_llr(const Eigen::ArrayX2d& pmf) {
  const int n = static_cast<int>(pmf.rows());
  Eigen::ArrayXd llr(n);
  for (int i = 0; i < n; ++i) {
    const double p0 = pmf(i, 0);
    const double p1 = pmf(i, 1);
    if (!(p0 >= 0.0) || !(p1 >= 0.0) || !(p0 + p1 > 0.0)) {
      throw std::invalid_argument("pmf_to_llr: invalid pmf");
    }
    llr(i) = std::log(p1 / p0);  // +/- inf at degenerate pmfs
  }
  return llr;
}

}  // namespace turbocs
