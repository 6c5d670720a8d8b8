// include/mdd/encoder-decoder.h

// Copyright 2026  MDD Engine Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// The attention branch: stacked-BLSTM encoder with frame-skipping
// subsampling, location-aware attention, LSTM decoder step, and the
// teacher-forced sequence negative log likelihood, each with a hand-derived
// backward pass.

#ifndef MDD_ENCODER_DECODER_H_
#define MDD_ENCODER_DECODER_H_

#include <vector>

#include "mdd/model.h"

namespace mdd {

struct EncoderCache {
  std::vector<Matrix> inputs;       // input sequence of each layer
  std::vector<BlstmCache> layers;
};

// Keep every 2nd frame (indices 0, 2, 4, ...): ceil(T/2) rows out.
Matrix SubsampleRows(const Matrix &seq);

// O: T x F -> S x De with S = ceil(T / subsample_factor).
Matrix Encode(const ModelParams &m, const Matrix &feats, EncoderCache *cache);
void EncodeBackward(const ModelParams &m, const EncoderCache &cache,
                    const Matrix &dh_enc, ModelParams *grads, Matrix *dfeats);

struct AttendCache {
  Vec h_dec, prev_align;
  Matrix loc_feat;  // S x K
  Matrix tanh_u;    // S x A
  Vec align;        // softmax output
};

// Location-aware attention. prev_align must be a length-S simplex vector.
void Attend(const AttentionParams &p, const Vec &h_dec, const Vec &prev_align,
            const Matrix &h_enc, Vec *context, Vec *align, AttendCache *cache);
// All of dcontext / dalign_ext may carry upstream gradient; dh_dec,
// dprev_align and dh_enc are accumulated into.
void AttendBackward(const AttentionParams &p, const Matrix &h_enc,
                    const AttendCache &cache, const Vec &dcontext,
                    const Vec &dalign_ext, AttentionParams *grad, Vec *dh_dec,
                    Vec *dprev_align, Matrix *dh_enc);

struct DecoderState {
  Vec h, c;
  Vec align;  // previous attention weights
};

DecoderState InitDecoderState(const ModelParams &m, int num_enc_frames);

struct DecoderStepCache {
  int y_prev = -1;
  AttendCache att;
  Vec context;
  LstmCache lstm;
  Vec readout_in;  // cat(h_l, context)
  Vec log_probs;
};

// One teacher-forced / search step: attends with the previous decoder state,
// advances the LSTM on cat(embed(y_prev), context), and emits log
// probabilities over U plus eos. y_prev must be sos or a phone id.
Vec DecoderStep(const ModelParams &m, int y_prev, const DecoderState &state,
                const Matrix &h_enc, DecoderState *next,
                DecoderStepCache *cache);

// Teacher-forced negative log likelihood of target_ids (phone ids, eos
// appended internally). When grads is non-null the full backward pass runs:
// parameter grads are scaled by grad_scale and dh_enc is accumulated.
double AttentionNll(const ModelParams &m, const Matrix &h_enc,
                    const std::vector<int> &target_ids, ModelParams *grads,
                    Matrix *dh_enc, double grad_scale = 1.0);

}  // namespace mdd

#endif  // MDD_ENCODER_DECODER_H_
