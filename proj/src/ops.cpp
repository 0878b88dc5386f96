#include "lpdgcn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lpdgcn::ad {

namespace {

template <typename T>
void same_tape(const Var<T>& a, const Var<T>& b, const char* op) {
  if (&a.tape() != &b.tape()) throw std::invalid_argument(std::string(op) + ": operands on different tapes");
}

template <typename T>
void shape_error(const char* op, const Matrix<T>& a, const Matrix<T>& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                              b.shape_string());
}

}  // namespace

template <typename T>
Var<T> matmul(const Var<T>& x, const Var<T>& w) {
  same_tape(x, w, "matmul");
  const auto& xv = x.value();
  const auto& wv = w.value();
  if (xv.cols() != wv.rows()) shape_error("matmul", xv, wv);
  Tape<T>* tape = &x.tape();
  const std::size_t xi = x.id(), wi = w.id();
  return tape->record(gemm(xv, false, wv, false), {xi, wi},
                      [tape, xi, wi](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                        if (in[0]) gemm_accumulate(*in[0], g, false, tape->value(wi), true);
                        if (in[1]) gemm_accumulate(*in[1], tape->value(xi), true, g, false);
                      });
}

template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b) {
  same_tape(x, w, "linear");
  same_tape(x, b, "linear");
  const auto& xv = x.value();
  const auto& wv = w.value();
  const auto& bv = b.value();
  if (xv.cols() != wv.rows()) shape_error("linear", xv, wv);
  if (bv.rows() != 1 || bv.cols() != wv.cols()) shape_error("linear(bias)", wv, bv);
  Matrix<T> out(xv.rows(), wv.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) std::copy(bv.data(), bv.data() + bv.cols(), out.row(r).data());
  gemm_accumulate(out, xv, false, wv, false);
  Tape<T>* tape = &x.tape();
  const std::size_t xi = x.id(), wi = w.id();
  return tape->record(std::move(out), {xi, wi, b.id()},
                      [tape, xi, wi](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                        if (in[0]) gemm_accumulate(*in[0], g, false, tape->value(wi), true);
                        if (in[1]) gemm_accumulate(*in[1], tape->value(xi), true, g, false);
                        if (in[2]) {
                          auto& gb = *in[2];
                          for (std::size_t r = 0; r < g.rows(); ++r)
                            for (std::size_t c = 0; c < g.cols(); ++c) gb[c] += g(r, c);
                        }
                      });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  same_tape(a, b, "add");
  const auto& av = a.value();
  const auto& bv = b.value();
  if (!av.same_shape(bv)) shape_error("add", av, bv);
  Matrix<T> out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return a.tape().record(std::move(out), {a.id(), b.id()},
                         [](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                           for (auto* slot : in)
                             if (slot)
                               for (std::size_t i = 0; i < g.size(); ++i) (*slot)[i] += g[i];
                         });
}

template <typename T>
Var<T> scale(const Var<T>& x, const Var<T>& s) {
  same_tape(x, s, "scale");
  if (!s.value().is_scalar()) throw std::invalid_argument("scale: factor must be scalar, got " + s.value().shape_string());
  const T factor = s.value().item();
  Matrix<T> out = x.value();
  for (auto& v : out.flat()) v *= factor;
  Tape<T>* tape = &x.tape();
  const std::size_t xi = x.id();
  return tape->record(std::move(out), {xi, s.id()},
                      [tape, xi, factor](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                        if (in[0])
                          for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += factor * g[i];
                        if (in[1]) {
                          const auto& xv = tape->value(xi);
                          T acc = 0;
                          for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * xv[i];
                          (*in[1])[0] += acc;
                        }
                      });
}

template <typename T>
Var<T> scale(const Var<T>& x, double c) {
  const T factor = static_cast<T>(c);
  Matrix<T> out = x.value();
  for (auto& v : out.flat()) v *= factor;
  return x.tape().record(std::move(out), {x.id()},
                         [factor](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                           for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += factor * g[i];
                         });
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  Matrix<T> out = x.value();
  for (auto& v : out.flat()) v = v > T(0) ? v : T(0);
  Tape<T>* tape = &x.tape();
  const std::size_t xi = x.id();
  return tape->record(std::move(out), {xi}, [tape, xi](const Matrix<T>& g, std::span<Matrix<T>*> in) {
    const auto& xv = tape->value(xi);
    auto& gx = *in[0];
    for (std::size_t i = 0; i < g.size(); ++i)
      if (xv[i] > T(0)) gx[i] += g[i];
  });
}

template <typename T>
Var<T> softplus(const Var<T>& x) {
  Matrix<T> out = x.value();
  for (auto& v : out.flat()) v = v > T(0) ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
  Tape<T>* tape = &x.tape();
  const std::size_t xi = x.id();
  return tape->record(std::move(out), {xi}, [tape, xi](const Matrix<T>& g, std::span<Matrix<T>*> in) {
    const auto& xv = tape->value(xi);
    for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i] / (T(1) + std::exp(-xv[i]));
  });
}

template <typename T>
Var<T> neighbor_sum(const Var<T>& x, std::span<const DirectedEdge> edges) {
  const auto& xv = x.value();
  const std::size_t n = xv.rows(), d = xv.cols();
  for (const auto& e : edges)
    if (e.src >= n || e.dst >= n)
      throw std::out_of_range("neighbor_sum: edge (" + std::to_string(e.src) + "," +
                              std::to_string(e.dst) + ") outside " + std::to_string(n) + " rows");
  Matrix<T> out(n, d);
  for (const auto& e : edges) {
    const T* src = xv.data() + e.src * d;
    T* dst = out.data() + e.dst * d;
    for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
  }
  std::vector<DirectedEdge> saved(edges.begin(), edges.end());
  return x.tape().record(std::move(out), {x.id()},
                         [saved = std::move(saved), d](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                           auto& gx = *in[0];
                           for (const auto& e : saved) {
                             const T* src = g.data() + e.dst * d;
                             T* dst = gx.data() + e.src * d;
                             for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
                           }
                         });
}

template <typename T>
Var<T> segment_sum(const Var<T>& x, std::span<const std::size_t> seg, std::size_t num_segments) {
  const auto& xv = x.value();
  const std::size_t d = xv.cols();
  if (seg.size() != xv.rows())
    throw std::invalid_argument("segment_sum: " + std::to_string(seg.size()) + " segment ids for " +
                                std::to_string(xv.rows()) + " rows");
  for (auto s : seg)
    if (s >= num_segments)
      throw std::out_of_range("segment_sum: segment id " + std::to_string(s) + " >= " +
                              std::to_string(num_segments));
  Matrix<T> out(num_segments, d);
  for (std::size_t r = 0; r < seg.size(); ++r) {
    const T* src = xv.data() + r * d;
    T* dst = out.data() + seg[r] * d;
    for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
  }
  std::vector<std::size_t> saved(seg.begin(), seg.end());
  return x.tape().record(std::move(out), {x.id()},
                         [saved = std::move(saved), d](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                           auto& gx = *in[0];
                           for (std::size_t r = 0; r < saved.size(); ++r) {
                             const T* src = g.data() + saved[r] * d;
                             T* dst = gx.data() + r * d;
                             for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
                           }
                         });
}

template <typename T>
Var<T> gather_rows(const Var<T>& x, std::span<const std::size_t> index) {
  const auto& xv = x.value();
  const std::size_t d = xv.cols();
  Matrix<T> out(index.size(), d);
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= xv.rows())
      throw std::out_of_range("gather_rows: index " + std::to_string(index[r]) + " >= " +
                              std::to_string(xv.rows()));
    std::copy_n(xv.data() + index[r] * d, d, out.data() + r * d);
  }
  std::vector<std::size_t> saved(index.begin(), index.end());
  return x.tape().record(std::move(out), {x.id()},
                         [saved = std::move(saved), d](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                           auto& gx = *in[0];
                           for (std::size_t r = 0; r < saved.size(); ++r) {
                             const T* src = g.data() + r * d;
                             T* dst = gx.data() + saved[r] * d;
                             for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
                           }
                         });
}

template <typename T>
Var<T> concat_features(const Var<T>& a, const Var<T>& b) {
  same_tape(a, b, "concat_features");
  const auto& av = a.value();
  const auto& bv = b.value();
  if (av.rows() != bv.rows()) shape_error("concat_features", av, bv);
  const std::size_t n = av.rows(), ca = av.cols(), cb = bv.cols();
  Matrix<T> out(n, ca + cb);
  for (std::size_t r = 0; r < n; ++r) {
    std::copy_n(av.data() + r * ca, ca, out.data() + r * (ca + cb));
    std::copy_n(bv.data() + r * cb, cb, out.data() + r * (ca + cb) + ca);
  }
  return a.tape().record(std::move(out), {a.id(), b.id()},
                         [n, ca, cb](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                           for (std::size_t r = 0; r < n; ++r) {
                             const T* src = g.data() + r * (ca + cb);
                             if (in[0])
                               for (std::size_t c = 0; c < ca; ++c) (*in[0])[r * ca + c] += src[c];
                             if (in[1])
                               for (std::size_t c = 0; c < cb; ++c) (*in[1])[r * cb + c] += src[ca + c];
                           }
                         });
}

template <typename T>
Var<T> row_sum(const Var<T>& x) {
  const auto& xv = x.value();
  const std::size_t d = xv.cols();
  Matrix<T> out(xv.rows(), 1);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    T acc = 0;
    for (auto v : xv.row(r)) acc += v;
    out[r] = acc;
  }
  return x.tape().record(std::move(out), {x.id()}, [d](const Matrix<T>& g, std::span<Matrix<T>*> in) {
    auto& gx = *in[0];
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < d; ++c) gx[r * d + c] += g[r];
  });
}

template <typename T>
Var<T> column(const Var<T>& x, std::size_t j) {
  const auto& xv = x.value();
  if (j >= xv.cols())
    throw std::out_of_range("column: index " + std::to_string(j) + " outside " + xv.shape_string());
  const std::size_t d = xv.cols();
  Matrix<T> out(xv.rows(), 1);
  for (std::size_t r = 0; r < xv.rows(); ++r) out[r] = xv(r, j);
  return x.tape().record(std::move(out), {x.id()}, [d, j](const Matrix<T>& g, std::span<Matrix<T>*> in) {
    for (std::size_t r = 0; r < g.rows(); ++r) (*in[0])[r * d + j] += g[r];
  });
}

template <typename T>
Var<T> scale_rows(const Var<T>& x, const Var<T>& c) {
  same_tape(x, c, "scale_rows");
  const auto& xv = x.value();
  const auto& cv = c.value();
  if (cv.rows() != xv.rows() || cv.cols() != 1) shape_error("scale_rows", xv, cv);
  const std::size_t d = xv.cols();
  Matrix<T> out = xv;
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t k = 0; k < d; ++k) out[r * d + k] *= cv[r];
  Tape<T>* tape = &x.tape();
  const std::size_t xi = x.id(), ci = c.id();
  return tape->record(std::move(out), {xi, ci},
                      [tape, xi, ci, d](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                        const auto& xv = tape->value(xi);
                        const auto& cv = tape->value(ci);
                        for (std::size_t r = 0; r < g.rows(); ++r) {
                          T acc = 0;
                          for (std::size_t k = 0; k < d; ++k) {
                            if (in[0]) (*in[0])[r * d + k] += g[r * d + k] * cv[r];
                            acc += g[r * d + k] * xv[r * d + k];
                          }
                          if (in[1]) (*in[1])[r] += acc;
                        }
                      });
}

template <typename T>
Var<T> softmax_rows(const Var<T>& x) {
  const auto& xv = x.value();
  const std::size_t d = xv.cols();
  Matrix<T> out(xv.rows(), d);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    auto in_row = xv.row(r);
    auto out_row = out.row(r);
    const T m = *std::max_element(in_row.begin(), in_row.end());
    T z = 0;
    for (std::size_t k = 0; k < d; ++k) z += (out_row[k] = std::exp(in_row[k] - m));
    for (auto& v : out_row) v /= z;
  }
  Matrix<T> probs = out;
  return x.tape().record(std::move(out), {x.id()},
                         [probs = std::move(probs), d](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                           auto& gx = *in[0];
                           for (std::size_t r = 0; r < g.rows(); ++r) {
                             T dot = 0;
                             for (std::size_t k = 0; k < d; ++k) dot += g[r * d + k] * probs[r * d + k];
                             for (std::size_t k = 0; k < d; ++k)
                               gx[r * d + k] += probs[r * d + k] * (g[r * d + k] - dot);
                           }
                         });
}

template <typename T>
Var<T> softmax_cross_entropy(const Var<T>& logits, std::span<const std::size_t> targets) {
  const auto& lv = logits.value();
  const std::size_t n = lv.rows(), c = lv.cols();
  if (targets.size() != n)
    throw std::invalid_argument("softmax_cross_entropy: " + std::to_string(targets.size()) +
                                " targets for " + std::to_string(n) + " rows");
  Matrix<T> probs(n, c);
  T loss = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (targets[r] >= c)
      throw std::out_of_range("softmax_cross_entropy: target " + std::to_string(targets[r]) +
                              " outside [0," + std::to_string(c) + ")");
    auto row = lv.row(r);
    const T m = *std::max_element(row.begin(), row.end());
    T z = 0;
    for (std::size_t k = 0; k < c; ++k) z += (probs(r, k) = std::exp(row[k] - m));
    for (std::size_t k = 0; k < c; ++k) probs(r, k) /= z;
    loss += m + std::log(z) - row[targets[r]];
  }
  std::vector<std::size_t> saved(targets.begin(), targets.end());
  return logits.tape().record(
      Matrix<T>::scalar(loss), {logits.id()},
      [probs = std::move(probs), saved = std::move(saved), c](const Matrix<T>& g, std::span<Matrix<T>*> in) {
        const T up = g[0];
        auto& gl = *in[0];
        for (std::size_t r = 0; r < saved.size(); ++r) {
          for (std::size_t k = 0; k < c; ++k) gl[r * c + k] += up * probs[r * c + k];
          gl[r * c + saved[r]] -= up;
        }
      });
}

template <typename T>
Var<T> rmse(const Var<T>& pred, const Matrix<T>& target) {
  const auto& pv = pred.value();
  if (!pv.same_shape(target)) shape_error("rmse", pv, target);
  if (pv.rows() == 0) throw std::invalid_argument("rmse: no rows");
  T sq = 0;
  for (std::size_t i = 0; i < pv.size(); ++i) sq += (pv[i] - target[i]) * (pv[i] - target[i]);
  const T n = static_cast<T>(pv.rows());
  const T value = std::sqrt(sq / n);
  Tape<T>* tape = &pred.tape();
  const std::size_t pi = pred.id();
  return tape->record(Matrix<T>::scalar(value), {pi},
                      [tape, pi, target, value, n](const Matrix<T>& g, std::span<Matrix<T>*> in) {
                        // d sqrt(S/n) = (pred - target) / (n * value); zero at a perfect fit.
                        if (value == T(0)) return;
                        const auto& pv = tape->value(pi);
                        const T k = g[0] / (n * value);
                        for (std::size_t i = 0; i < pv.size(); ++i) (*in[0])[i] += k * (pv[i] - target[i]);
                      });
}

template <typename T>
Var<T> sum_all(const Var<T>& x) {
  T acc = 0;
  for (auto v : x.value().flat()) acc += v;
  return x.tape().record(Matrix<T>::scalar(acc), {x.id()}, [](const Matrix<T>& g, std::span<Matrix<T>*> in) {
    for (auto& v : in[0]->flat()) v += g[0];
  });
}

template <typename T>
Var<T> batch_norm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, BatchNormStats<T>& stats,
                  Mode mode) {
  same_tape(x, gamma, "batch_norm");
  same_tape(x, beta, "batch_norm");
  const auto& xv = x.value();
  const std::size_t n = xv.rows(), d = xv.cols();
  if (gamma.value().rows() != 1 || gamma.value().cols() != d) shape_error("batch_norm(gamma)", xv, gamma.value());
  if (beta.value().rows() != 1 || beta.value().cols() != d) shape_error("batch_norm(beta)", xv, beta.value());
  if (stats.running_mean.cols() != d || stats.running_var.cols() != d)
    shape_error("batch_norm(stats)", xv, stats.running_mean);
  const auto& gv = gamma.value();
  const auto& bv = beta.value();
  const T eps = static_cast<T>(stats.epsilon);

  Matrix<T> mean(1, d), inv_std(1, d);
  if (mode == Mode::train) {
    if (n < 2) throw std::invalid_argument("batch_norm: train mode needs at least 2 rows, got " + std::to_string(n));
    Matrix<T> var(1, d);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) mean[c] += xv(r, c);
    for (std::size_t c = 0; c < d; ++c) mean[c] /= static_cast<T>(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        const T dx = xv(r, c) - mean[c];
        var[c] += dx * dx;
      }
    const T m = static_cast<T>(stats.momentum);
    for (std::size_t c = 0; c < d; ++c) {
      const T biased = var[c] / static_cast<T>(n);
      inv_std[c] = T(1) / std::sqrt(biased + eps);
      stats.running_mean[c] = (T(1) - m) * stats.running_mean[c] + m * mean[c];
      stats.running_var[c] = (T(1) - m) * stats.running_var[c] + m * (var[c] / static_cast<T>(n - 1));
    }
  } else {
    for (std::size_t c = 0; c < d; ++c) {
      mean[c] = stats.running_mean[c];
      inv_std[c] = T(1) / std::sqrt(stats.running_var[c] + eps);
    }
  }

  Matrix<T> xhat(n, d), out(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      xhat(r, c) = (xv(r, c) - mean[c]) * inv_std[c];
      out(r, c) = gv[c] * xhat(r, c) + bv[c];
    }

  Tape<T>* tape = &x.tape();
  const std::size_t gi = gamma.id();
  const bool batch_stats = mode == Mode::train;
  return tape->record(
      std::move(out), {x.id(), gi, beta.id()},
      [tape, gi, xhat = std::move(xhat), inv_std, n, d, batch_stats](const Matrix<T>& g,
                                                                     std::span<Matrix<T>*> in) {
        const auto& gv = tape->value(gi);
        if (in[1] || in[2]) {
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < d; ++c) {
              if (in[1]) (*in[1])[c] += g(r, c) * xhat(r, c);
              if (in[2]) (*in[2])[c] += g(r, c);
            }
        }
        if (!in[0]) return;
        auto& gx = *in[0];
        if (!batch_stats) {
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < d; ++c) gx(r, c) += g(r, c) * gv[c] * inv_std[c];
          return;
        }
        for (std::size_t c = 0; c < d; ++c) {
          T sum_dxhat = 0, sum_dxhat_xhat = 0;
          for (std::size_t r = 0; r < n; ++r) {
            const T dxh = g(r, c) * gv[c];
            sum_dxhat += dxh;
            sum_dxhat_xhat += dxh * xhat(r, c);
          }
          const T nn = static_cast<T>(n);
          for (std::size_t r = 0; r < n; ++r) {
            const T dxh = g(r, c) * gv[c];
            gx(r, c) += inv_std[c] / nn * (nn * dxh - sum_dxhat - xhat(r, c) * sum_dxhat_xhat);
          }
        }
      });
}

template <typename T>
Var<T> dropout(const Var<T>& x, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout: ratio must be in [0,1), got " + std::to_string(p));
  if (mode == Mode::eval || p == 0.0) return x;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  const auto& xv = x.value();
  Matrix<T> mask(xv.rows(), xv.cols());
  Matrix<T> out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    mask[i] = rng.uniform() < p ? T(0) : keep_scale;
    out[i] = xv[i] * mask[i];
  }
  return x.tape().record(std::move(out), {x.id()}, [mask = std::move(mask)](const Matrix<T>& g, std::span<Matrix<T>*> in) {
    for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i] * mask[i];
  });
}

#define LPDGCN_INSTANTIATE_OPS(T)                                                                   \
  template Var<T> matmul(const Var<T>&, const Var<T>&);                                             \
  template Var<T> linear(const Var<T>&, const Var<T>&, const Var<T>&);                              \
  template Var<T> add(const Var<T>&, const Var<T>&);                                                \
  template Var<T> scale(const Var<T>&, const Var<T>&);                                              \
  template Var<T> scale(const Var<T>&, double);                                                     \
  template Var<T> relu(const Var<T>&);                                                              \
  template Var<T> softplus(const Var<T>&);                                                          \
  template Var<T> neighbor_sum(const Var<T>&, std::span<const DirectedEdge>);                       \
  template Var<T> segment_sum(const Var<T>&, std::span<const std::size_t>, std::size_t);            \
  template Var<T> gather_rows(const Var<T>&, std::span<const std::size_t>);                         \
  template Var<T> concat_features(const Var<T>&, const Var<T>&);                                    \
  template Var<T> row_sum(const Var<T>&);                                                           \
  template Var<T> column(const Var<T>&, std::size_t);                                               \
  template Var<T> scale_rows(const Var<T>&, const Var<T>&);                                         \
  template Var<T> softmax_rows(const Var<T>&);                                                      \
  template Var<T> softmax_cross_entropy(const Var<T>&, std::span<const std::size_t>);               \
  template Var<T> rmse(const Var<T>&, const Matrix<T>&);                                            \
  template Var<T> sum_all(const Var<T>&);                                                           \
  template Var<T> batch_norm(const Var<T>&, const Var<T>&, const Var<T>&, BatchNormStats<T>&, Mode); \
  template Var<T> dropout(const Var<T>&, double, Mode, Rng&);

LPDGCN_INSTANTIATE_OPS(float)
LPDGCN_INSTANTIATE_OPS(double)
LPDGCN_INSTANTIATE_OPS(long double)

}  // namespace lpdgcn::ad
