#include "repdyn/checkpoint.hpp"

#include "repdyn/errors.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace repdyn {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'D', 'M', 'L', 'P', '0', '0', '1'};
constexpr std::uint32_t kActivationRelu = 0;

void put_u32(std::ostream& out, std::uint32_t value) {
  std::array<char, 4> bytes{};
  for (int i = 0; i < 4; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(bits));
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) value |= static_cast<std::uint32_t>(bytes[static_cast<std::size_t>(i)]) << (8 * i);
  return value;
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(i)]) << (8 * i);
  double value = 0.0;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

void write_stack(std::ostream& out, const std::vector<DenseLayer>& layers) {
  for (const DenseLayer& layer : layers) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
        put_f64(out, layer.weight(i, j));
      }
    }
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) put_f64(out, layer.bias[j]);
  }
}

void read_stack(std::istream& in, std::vector<DenseLayer>& layers) {
  for (DenseLayer& layer : layers) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
        layer.weight(i, j) = get_f64(in);
      }
    }
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) layer.bias[j] = get_f64(in);
  }
}

}  // namespace

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw error("cannot open " + path.string() + " for writing");
  }
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kActivationRelu);
  put_u32(out, static_cast<std::uint32_t>(model.encoder.size()));
  put_u32(out, static_cast<std::uint32_t>(model.projector.size()));
  for (const auto* stack : {&model.encoder, &model.projector}) {
    for (const DenseLayer& layer : *stack) {
      put_u32(out, static_cast<std::uint32_t>(layer.weight.rows()));
      put_u32(out, static_cast<std::uint32_t>(layer.weight.cols()));
    }
  }
  write_stack(out, model.encoder);
  write_stack(out, model.projector);
  if (!out) {
    throw error("failed while writing " + path.string());
  }
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw invalid_input_error("cannot open " + path.string());
  }
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw invalid_input_error(path.string() + " is not a model checkpoint");
  }
  const std::uint32_t activation = get_u32(in);
  if (activation != kActivationRelu) {
    throw invalid_input_error(path.string() + ": unsupported activation id");
  }
  const std::uint32_t encoder_count = get_u32(in);
  const std::uint32_t projector_count = get_u32(in);
  if (encoder_count == 0 || projector_count == 0 || encoder_count > 1024 ||
      projector_count > 1024) {
    throw invalid_input_error(path.string() + ": implausible layer counts");
  }
  MlpModel model;
  model.encoder.resize(encoder_count);
  model.projector.resize(projector_count);
  for (auto* stack : {&model.encoder, &model.projector}) {
    for (DenseLayer& layer : *stack) {
      const std::uint32_t in_dim = get_u32(in);
      const std::uint32_t out_dim = get_u32(in);
      if (in_dim == 0 || out_dim == 0 || in_dim > 1 << 20 || out_dim > 1 << 20) {
        throw invalid_input_error(path.string() + ": implausible layer dimensions");
      }
      layer.weight.resize(in_dim, out_dim);
      layer.bias.resize(out_dim);
    }
  }
  read_stack(in, model.encoder);
  read_stack(in, model.projector);
  if (!in) {
    throw invalid_input_error(path.string() + " is truncated");
  }
  model.validate();
  return model;
}

}  // namespace repdyn
