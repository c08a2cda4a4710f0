#ifndef SPELLRING_MODEL_HPP
#define SPELLRING_MODEL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "spellring/ctc.hpp"
#include "spellring/matrix.hpp"
#include "spellring/rng.hpp"

namespace spellring {

// Time-aligned input window for the recognizer.
struct FusedWindow {
  Matrix acoustic_feats;  // [A x T] cropped differential-profile features
  Matrix motion_feats;    // [3 x T] normalized gyro
  double frame_period = 0.0;
};

void validate(const FusedWindow& window);

// Which input the model consumes; the other branch sees zeros. Stored in
// checkpoints so evaluation applies the same masking.
enum class Modality { Fusion, AcousticOnly, MotionOnly };

const char* modality_name(Modality m);
Modality parse_modality(const std::string& name);

// Convolutions are kernel 5, stride 2, zero-padding 2, so every layer maps
// T to ceil(T/2); the pooling stages do the same. Weight layout is
// [out_ch][kernel][in_ch] (innermost matches the time-major activations).
inline constexpr std::size_t kConvKernel = 5;
inline constexpr std::size_t kConvStride = 2;
inline constexpr std::size_t kConvPad = 2;
inline constexpr std::size_t kPoolWidth = 2;
inline constexpr std::size_t kTotalStride = 16;  // two conv+pool pairs

template <typename S>
struct ConvLayerT {
  std::size_t in_ch = 0, out_ch = 0;
  std::vector<S> w;  // out_ch * kConvKernel * in_ch
  std::vector<S> b;  // out_ch
};

template <typename S>
struct DenseT {
  std::size_t in_dim = 0, out_dim = 0;
  std::vector<S> w;  // out_dim * in_dim
  std::vector<S> b;  // out_dim
};

// Two conv+pool stages per branch (acoustic A->32->32, motion 3->16->16),
// then per-frame dense 48->64, dropout, dense 64->27.
template <typename S>
struct ModelParamsT {
  std::size_t acoustic_bins = 48;
  ConvLayerT<S> a_conv1, a_conv2;
  ConvLayerT<S> m_conv1, m_conv2;
  DenseT<S> fc1, fc2;
  double dropout = 0.2;
  Modality modality = Modality::Fusion;
};

using ModelParams = ModelParamsT<float>;

// He-uniform weights, zero biases; the draw order is fixed so a seed pins
// every parameter.
template <typename S>
ModelParamsT<S> init_model(std::size_t acoustic_bins, double dropout,
                           Modality modality, Rng& rng);

// Zeroed clone with identical shapes; used for gradients and Adam state.
template <typename S>
ModelParamsT<S> zeros_like(const ModelParamsT<S>& params);

template <typename S>
struct TensorRef {
  std::string name;
  std::vector<S>* data;
  std::vector<std::size_t> shape;
};

// All trainable tensors in a fixed order (checkpoint + optimizer order).
template <typename S>
std::vector<TensorRef<S>> param_tensors(ModelParamsT<S>& params);

// Output frames for a T-frame window: ceil at every halving stage, so the
// result is exactly ceil(T / kTotalStride).
std::size_t model_output_frames(std::size_t input_frames);

// Saved activations from one forward pass, consumed by backward().
template <typename S>
struct ForwardTraceT {
  MatrixT<S> a_in, a_z1, a_r1, a_p1, a_z2, a_r2, a_p2;
  MatrixT<S> m_in, m_z1, m_r1, m_p1, m_z2, m_r2, m_p2;
  MatrixT<S> fused, f_z1, f_drop, drop_mask, logits;
};

// Runs the network; returns the row-stochastic posterior [T' x 27] (softmax
// computed in double). Passing dropout_rng enables inverted dropout
// (training); null disables it (inference).
template <typename S>
Matrix model_forward(const ModelParamsT<S>& params, const FusedWindow& window,
                     ForwardTraceT<S>* trace, Rng* dropout_rng);

// Inference wrapper.
LetterPosterior forward(const ModelParams& params, const FusedWindow& window);

// Accumulates (+=) parameter gradients for one item given d(loss)/d(logits);
// pair with the trace produced by the same model_forward call.
template <typename S>
void model_backward(const ModelParamsT<S>& params,
                    const ForwardTraceT<S>& trace, const Matrix& grad_logits,
                    ModelParamsT<S>* grads);

}  // namespace spellring

#endif
