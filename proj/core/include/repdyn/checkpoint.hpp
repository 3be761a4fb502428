#pragma once

#include "repdyn/mlp.hpp"

#include <filesystem>

namespace repdyn {

/**
 * Flat binary model checkpoint.
 *
 * Layout (all integers and reals little-endian):
 *   bytes 0..7   magic "RDMLP001"
 *   u32          activation id (0 = ReLU between layers, identity outputs)
 *   u32          encoder layer count E
 *   u32          projector layer count P
 *   (E+P) x      u32 in_dim, u32 out_dim   (encoder layers first)
 *   (E+P) x      f64 weights row-major (in_dim rows of out_dim), f64 biases
 *
 * Weights and biases follow the header in the same layer order.
 */
void save_checkpoint(const MlpModel& model, const std::filesystem::path& path);

MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace repdyn
