#include "spellring/model.hpp"

#include <cmath>
#include <string>

#include "spellring/alphabet.hpp"
#include "spellring/error.hpp"

namespace spellring {

namespace {

std::size_t half_ceil(std::size_t t) { return (t + 1) / 2; }

template <typename S>
ConvLayerT<S> make_conv(std::size_t in_ch, std::size_t out_ch) {
  ConvLayerT<S> layer;
  layer.in_ch = in_ch;
  layer.out_ch = out_ch;
  layer.w.assign(out_ch * kConvKernel * in_ch, S(0));
  layer.b.assign(out_ch, S(0));
  return layer;
}

template <typename S>
DenseT<S> make_dense(std::size_t in_dim, std::size_t out_dim) {
  DenseT<S> layer;
  layer.in_dim = in_dim;
  layer.out_dim = out_dim;
  layer.w.assign(out_dim * in_dim, S(0));
  layer.b.assign(out_dim, S(0));
  return layer;
}

template <typename S>
void he_uniform(std::vector<S>& w, std::size_t fan_in, Rng& rng) {
  double limit = std::sqrt(6.0 / double(fan_in));
  for (S& v : w) v = S(rng.uniform(-limit, limit));
}

// ---- layer kernels (time-major activations [T x C]) ----

template <typename S>
MatrixT<S> conv1d_fwd(const MatrixT<S>& in, const ConvLayerT<S>& layer) {
  const std::size_t T = in.rows();
  const std::size_t To = half_ceil(T);
  MatrixT<S> out(To, layer.out_ch);
  for (std::size_t to = 0; to < To; ++to) {
    std::ptrdiff_t start =
        std::ptrdiff_t(to * kConvStride) - std::ptrdiff_t(kConvPad);
    for (std::size_t co = 0; co < layer.out_ch; ++co) {
      S acc = layer.b[co];
      const S* wc = layer.w.data() + co * kConvKernel * layer.in_ch;
      for (std::size_t dk = 0; dk < kConvKernel; ++dk) {
        std::ptrdiff_t tin = start + std::ptrdiff_t(dk);
        if (tin < 0 || tin >= std::ptrdiff_t(T)) continue;
        const S* row = in.row(std::size_t(tin));
        const S* wk = wc + dk * layer.in_ch;
        for (std::size_t ci = 0; ci < layer.in_ch; ++ci)
          acc += wk[ci] * row[ci];
      }
      out.at(to, co) = acc;
    }
  }
  return out;
}

template <typename S>
void conv1d_bwd(const MatrixT<S>& in, const ConvLayerT<S>& layer,
                const MatrixT<S>& d_out, MatrixT<S>* d_in,
                ConvLayerT<S>* grads) {
  const std::size_t T = in.rows();
  if (d_in) *d_in = MatrixT<S>(T, layer.in_ch, S(0));
  for (std::size_t to = 0; to < d_out.rows(); ++to) {
    std::ptrdiff_t start =
        std::ptrdiff_t(to * kConvStride) - std::ptrdiff_t(kConvPad);
    for (std::size_t co = 0; co < layer.out_ch; ++co) {
      S g = d_out.at(to, co);
      if (g == S(0)) continue;
      grads->b[co] += g;
      S* gw = grads->w.data() + co * kConvKernel * layer.in_ch;
      const S* wc = layer.w.data() + co * kConvKernel * layer.in_ch;
      for (std::size_t dk = 0; dk < kConvKernel; ++dk) {
        std::ptrdiff_t tin = start + std::ptrdiff_t(dk);
        if (tin < 0 || tin >= std::ptrdiff_t(T)) continue;
        const S* row = in.row(std::size_t(tin));
        S* gk = gw + dk * layer.in_ch;
        for (std::size_t ci = 0; ci < layer.in_ch; ++ci)
          gk[ci] += g * row[ci];
        if (d_in) {
          S* drow = d_in->row(std::size_t(tin));
          const S* wk = wc + dk * layer.in_ch;
          for (std::size_t ci = 0; ci < layer.in_ch; ++ci)
            drow[ci] += g * wk[ci];
        }
      }
    }
  }
}

template <typename S>
MatrixT<S> relu_fwd(const MatrixT<S>& in) {
  MatrixT<S> out = in;
  for (S& v : out.data())
    if (v < S(0)) v = S(0);
  return out;
}

template <typename S>
MatrixT<S> relu_bwd(const MatrixT<S>& pre, const MatrixT<S>& d_out) {
  MatrixT<S> d_in = d_out;
  for (std::size_t i = 0; i < d_in.data().size(); ++i)
    if (pre.data()[i] <= S(0)) d_in.data()[i] = S(0);
  return d_in;
}

// Average pooling width 2, stride 2, ceil mode: a trailing odd frame forms
// its own window (mean over the single valid element).
template <typename S>
MatrixT<S> pool_fwd(const MatrixT<S>& in) {
  const std::size_t To = half_ceil(in.rows());
  MatrixT<S> out(To, in.cols());
  for (std::size_t to = 0; to < To; ++to) {
    std::size_t t0 = 2 * to;
    bool pair = t0 + 1 < in.rows();
    for (std::size_t c = 0; c < in.cols(); ++c) {
      S sum = in.at(t0, c);
      if (pair) sum += in.at(t0 + 1, c);
      out.at(to, c) = pair ? sum / S(2) : sum;
    }
  }
  return out;
}

template <typename S>
MatrixT<S> pool_bwd(std::size_t in_rows, const MatrixT<S>& d_out) {
  MatrixT<S> d_in(in_rows, d_out.cols(), S(0));
  for (std::size_t to = 0; to < d_out.rows(); ++to) {
    std::size_t t0 = 2 * to;
    bool pair = t0 + 1 < in_rows;
    for (std::size_t c = 0; c < d_out.cols(); ++c) {
      S g = pair ? d_out.at(to, c) / S(2) : d_out.at(to, c);
      d_in.at(t0, c) += g;
      if (pair) d_in.at(t0 + 1, c) += g;
    }
  }
  return d_in;
}

template <typename S>
MatrixT<S> dense_fwd(const MatrixT<S>& in, const DenseT<S>& layer) {
  MatrixT<S> out(in.rows(), layer.out_dim);
  for (std::size_t t = 0; t < in.rows(); ++t) {
    const S* row = in.row(t);
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      S acc = layer.b[o];
      const S* wr = layer.w.data() + o * layer.in_dim;
      for (std::size_t i = 0; i < layer.in_dim; ++i) acc += wr[i] * row[i];
      out.at(t, o) = acc;
    }
  }
  return out;
}

template <typename S>
MatrixT<S> dense_bwd(const MatrixT<S>& in, const DenseT<S>& layer,
                     const MatrixT<S>& d_out, DenseT<S>* grads) {
  MatrixT<S> d_in(in.rows(), layer.in_dim, S(0));
  for (std::size_t t = 0; t < in.rows(); ++t) {
    const S* row = in.row(t);
    S* drow = d_in.row(t);
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      S g = d_out.at(t, o);
      if (g == S(0)) continue;
      grads->b[o] += g;
      S* gw = grads->w.data() + o * layer.in_dim;
      const S* wr = layer.w.data() + o * layer.in_dim;
      for (std::size_t i = 0; i < layer.in_dim; ++i) {
        gw[i] += g * row[i];
        drow[i] += g * wr[i];
      }
    }
  }
  return d_in;
}

// Channel-major [C x T] world input to time-major [T x C] scalar matrix,
// optionally zeroed when the modality masks this branch out.
template <typename S>
MatrixT<S> to_time_major(const Matrix& feats, bool masked) {
  MatrixT<S> out(feats.cols(), feats.rows());
  if (masked) return out;
  for (std::size_t c = 0; c < feats.rows(); ++c)
    for (std::size_t t = 0; t < feats.cols(); ++t)
      out.at(t, c) = S(feats.at(c, t));
  return out;
}

template <typename S>
void check_finite(const MatrixT<S>& m, const char* layer) {
  for (const S& v : m.data())
    if (!std::isfinite(double(v)))
      raise(ErrorKind::Numeric,
            std::string("non-finite activation in layer ") + layer);
}

}  // namespace

void validate(const FusedWindow& window) {
  if (window.acoustic_feats.cols() == 0)
    raise(ErrorKind::InsufficientData, "fused window has no frames");
  if (window.acoustic_feats.cols() != window.motion_feats.cols())
    raise(ErrorKind::Alignment,
          "fused window frame counts differ: acoustic " +
              std::to_string(window.acoustic_feats.cols()) + " vs motion " +
              std::to_string(window.motion_feats.cols()));
  if (window.motion_feats.rows() != 3)
    raise(ErrorKind::InvalidArgument, "motion features must have 3 rows");
}

const char* modality_name(Modality m) {
  switch (m) {
    case Modality::Fusion: return "fusion";
    case Modality::AcousticOnly: return "acoustic";
    case Modality::MotionOnly: return "motion";
  }
  return "fusion";
}

Modality parse_modality(const std::string& name) {
  if (name == "fusion") return Modality::Fusion;
  if (name == "acoustic") return Modality::AcousticOnly;
  if (name == "motion") return Modality::MotionOnly;
  raise(ErrorKind::Config, "unknown modality '" + name +
                               "' (expected fusion, acoustic, or motion)");
}

std::size_t model_output_frames(std::size_t input_frames) {
  std::size_t t = input_frames;
  for (int stage = 0; stage < 4; ++stage) t = half_ceil(t);
  return t;
}

template <typename S>
ModelParamsT<S> init_model(std::size_t acoustic_bins, double dropout,
                           Modality modality, Rng& rng) {
  if (acoustic_bins == 0)
    raise(ErrorKind::Config, "model needs at least one acoustic bin");
  if (dropout < 0.0 || dropout >= 1.0)
    raise(ErrorKind::Config, "dropout must be in [0, 1)");

  ModelParamsT<S> p;
  p.acoustic_bins = acoustic_bins;
  p.dropout = dropout;
  p.modality = modality;
  p.a_conv1 = make_conv<S>(acoustic_bins, 32);
  p.a_conv2 = make_conv<S>(32, 32);
  p.m_conv1 = make_conv<S>(3, 16);
  p.m_conv2 = make_conv<S>(16, 16);
  p.fc1 = make_dense<S>(48, 64);
  p.fc2 = make_dense<S>(64, kAlphabetSize);

  he_uniform(p.a_conv1.w, acoustic_bins * kConvKernel, rng);
  he_uniform(p.a_conv2.w, 32 * kConvKernel, rng);
  he_uniform(p.m_conv1.w, 3 * kConvKernel, rng);
  he_uniform(p.m_conv2.w, 16 * kConvKernel, rng);
  he_uniform(p.fc1.w, p.fc1.in_dim, rng);
  he_uniform(p.fc2.w, p.fc2.in_dim, rng);
  return p;
}

template <typename S>
ModelParamsT<S> zeros_like(const ModelParamsT<S>& params) {
  ModelParamsT<S> z = params;
  for (TensorRef<S>& t : param_tensors(z))
    std::fill(t.data->begin(), t.data->end(), S(0));
  return z;
}

template <typename S>
std::vector<TensorRef<S>> param_tensors(ModelParamsT<S>& p) {
  auto conv = [](const std::string& name, ConvLayerT<S>& c,
                 std::vector<TensorRef<S>>& out) {
    out.push_back({name + "/w", &c.w, {c.out_ch, kConvKernel, c.in_ch}});
    out.push_back({name + "/b", &c.b, {c.out_ch}});
  };
  auto dense = [](const std::string& name, DenseT<S>& d,
                  std::vector<TensorRef<S>>& out) {
    out.push_back({name + "/w", &d.w, {d.out_dim, d.in_dim}});
    out.push_back({name + "/b", &d.b, {d.out_dim}});
  };
  std::vector<TensorRef<S>> out;
  conv("a_conv1", p.a_conv1, out);
  conv("a_conv2", p.a_conv2, out);
  conv("m_conv1", p.m_conv1, out);
  conv("m_conv2", p.m_conv2, out);
  dense("fc1", p.fc1, out);
  dense("fc2", p.fc2, out);
  return out;
}

template <typename S>
Matrix model_forward(const ModelParamsT<S>& params, const FusedWindow& window,
                     ForwardTraceT<S>* trace, Rng* dropout_rng) {
  validate(window);
  if (window.acoustic_feats.rows() != params.acoustic_bins)
    raise(ErrorKind::InvalidArgument,
          "window has " + std::to_string(window.acoustic_feats.rows()) +
              " acoustic bins but the model expects " +
              std::to_string(params.acoustic_bins));

  ForwardTraceT<S> local;
  ForwardTraceT<S>& tr = trace ? *trace : local;

  tr.a_in = to_time_major<S>(window.acoustic_feats,
                             params.modality == Modality::MotionOnly);
  tr.m_in = to_time_major<S>(window.motion_feats,
                             params.modality == Modality::AcousticOnly);

  tr.a_z1 = conv1d_fwd(tr.a_in, params.a_conv1);
  tr.a_r1 = relu_fwd(tr.a_z1);
  tr.a_p1 = pool_fwd(tr.a_r1);
  tr.a_z2 = conv1d_fwd(tr.a_p1, params.a_conv2);
  tr.a_r2 = relu_fwd(tr.a_z2);
  tr.a_p2 = pool_fwd(tr.a_r2);
  check_finite(tr.a_p2, "acoustic branch");

  tr.m_z1 = conv1d_fwd(tr.m_in, params.m_conv1);
  tr.m_r1 = relu_fwd(tr.m_z1);
  tr.m_p1 = pool_fwd(tr.m_r1);
  tr.m_z2 = conv1d_fwd(tr.m_p1, params.m_conv2);
  tr.m_r2 = relu_fwd(tr.m_z2);
  tr.m_p2 = pool_fwd(tr.m_r2);
  check_finite(tr.m_p2, "motion branch");

  const std::size_t To = tr.a_p2.rows();
  tr.fused = MatrixT<S>(To, 48);
  for (std::size_t t = 0; t < To; ++t) {
    for (std::size_t c = 0; c < 32; ++c) tr.fused.at(t, c) = tr.a_p2.at(t, c);
    for (std::size_t c = 0; c < 16; ++c)
      tr.fused.at(t, 32 + c) = tr.m_p2.at(t, c);
  }

  tr.f_z1 = dense_fwd(tr.fused, params.fc1);
  MatrixT<S> f_a1 = relu_fwd(tr.f_z1);

  tr.drop_mask = MatrixT<S>(To, params.fc1.out_dim, S(1));
  if (dropout_rng && params.dropout > 0.0) {
    S scale = S(1.0 / (1.0 - params.dropout));
    for (S& v : tr.drop_mask.data())
      v = dropout_rng->chance(params.dropout) ? S(0) : scale;
  }
  tr.f_drop = f_a1;
  for (std::size_t i = 0; i < tr.f_drop.data().size(); ++i)
    tr.f_drop.data()[i] *= tr.drop_mask.data()[i];

  tr.logits = dense_fwd(tr.f_drop, params.fc2);
  check_finite(tr.logits, "fusion head");

  // Softmax in double; the posterior feeds the double-precision CTC.
  Matrix posterior(To, kAlphabetSize);
  for (std::size_t t = 0; t < To; ++t) {
    double mx = double(tr.logits.at(t, 0));
    for (std::size_t k = 1; k < kAlphabetSize; ++k)
      mx = std::max(mx, double(tr.logits.at(t, k)));
    double sum = 0.0;
    for (std::size_t k = 0; k < kAlphabetSize; ++k) {
      double e = std::exp(double(tr.logits.at(t, k)) - mx);
      posterior.at(t, k) = e;
      sum += e;
    }
    for (std::size_t k = 0; k < kAlphabetSize; ++k) posterior.at(t, k) /= sum;
  }
  return posterior;
}

LetterPosterior forward(const ModelParams& params, const FusedWindow& window) {
  LetterPosterior post;
  post.probs = model_forward<float>(params, window, nullptr, nullptr);
  return post;
}

template <typename S>
void model_backward(const ModelParamsT<S>& params,
                    const ForwardTraceT<S>& trace, const Matrix& grad_logits,
                    ModelParamsT<S>* grads) {
  if (grad_logits.rows() != trace.logits.rows() ||
      grad_logits.cols() != trace.logits.cols())
    raise(ErrorKind::InvalidArgument,
          "gradient shape does not match the forward trace");

  MatrixT<S> d_logits(grad_logits.rows(), grad_logits.cols());
  for (std::size_t i = 0; i < grad_logits.data().size(); ++i)
    d_logits.data()[i] = S(grad_logits.data()[i]);

  MatrixT<S> d_drop = dense_bwd(trace.f_drop, params.fc2, d_logits, &grads->fc2);
  for (std::size_t i = 0; i < d_drop.data().size(); ++i)
    d_drop.data()[i] *= trace.drop_mask.data()[i];
  MatrixT<S> d_fz1 = relu_bwd(trace.f_z1, d_drop);
  MatrixT<S> d_fused = dense_bwd(trace.fused, params.fc1, d_fz1, &grads->fc1);

  const std::size_t To = d_fused.rows();
  MatrixT<S> d_ap2(To, 32), d_mp2(To, 16);
  for (std::size_t t = 0; t < To; ++t) {
    for (std::size_t c = 0; c < 32; ++c) d_ap2.at(t, c) = d_fused.at(t, c);
    for (std::size_t c = 0; c < 16; ++c) d_mp2.at(t, c) = d_fused.at(t, 32 + c);
  }

  // Acoustic branch, deepest stage first.
  {
    MatrixT<S> d_r2 = pool_bwd(trace.a_r2.rows(), d_ap2);
    MatrixT<S> d_z2 = relu_bwd(trace.a_z2, d_r2);
    MatrixT<S> d_p1;
    conv1d_bwd(trace.a_p1, params.a_conv2, d_z2, &d_p1, &grads->a_conv2);
    MatrixT<S> d_r1 = pool_bwd(trace.a_r1.rows(), d_p1);
    MatrixT<S> d_z1 = relu_bwd(trace.a_z1, d_r1);
    conv1d_bwd<S>(trace.a_in, params.a_conv1, d_z1, nullptr, &grads->a_conv1);
  }
  {
    MatrixT<S> d_r2 = pool_bwd(trace.m_r2.rows(), d_mp2);
    MatrixT<S> d_z2 = relu_bwd(trace.m_z2, d_r2);
    MatrixT<S> d_p1;
    conv1d_bwd(trace.m_p1, params.m_conv2, d_z2, &d_p1, &grads->m_conv2);
    MatrixT<S> d_r1 = pool_bwd(trace.m_r1.rows(), d_p1);
    MatrixT<S> d_z1 = relu_bwd(trace.m_z1, d_r1);
    conv1d_bwd<S>(trace.m_in, params.m_conv1, d_z1, nullptr, &grads->m_conv1);
  }
}

// The float instantiation trains and serves; the double one exists for
// finite-difference verification in the tests.
template ModelParamsT<float> init_model<float>(std::size_t, double, Modality,
                                               Rng&);
template ModelParamsT<double> init_model<double>(std::size_t, double, Modality,
                                                 Rng&);
template ModelParamsT<float> zeros_like<float>(const ModelParamsT<float>&);
template ModelParamsT<double> zeros_like<double>(const ModelParamsT<double>&);
template std::vector<TensorRef<float>> param_tensors<float>(
    ModelParamsT<float>&);
template std::vector<TensorRef<double>> param_tensors<double>(
    ModelParamsT<double>&);
template Matrix model_forward<float>(const ModelParamsT<float>&,
                                     const FusedWindow&, ForwardTraceT<float>*,
                                     Rng*);
template Matrix model_forward<double>(const ModelParamsT<double>&,
                                      const FusedWindow&,
                                      ForwardTraceT<double>*, Rng*);
template void model_backward<float>(const ModelParamsT<float>&,
                                    const ForwardTraceT<float>&, const Matrix&,
                                    ModelParamsT<float>*);
template void model_backward<double>(const ModelParamsT<double>&,
                                     const ForwardTraceT<double>&,
                                     const Matrix&, ModelParamsT<double>*);

}  // namespace spellring
