#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace verve::nn {

// Dense row-major float matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, float fill = 0.0f) : rows(r), cols(c), data(r * c, fill) {}

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  float& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  float operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<float> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const float> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  void zero() { std::fill(data.begin(), data.end(), 0.0f); }
};

using Rng = std::mt19937_64;

// Trainable tensor with its gradient and Adam moments.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m;
  Matrix v;
};

enum class Init { Zeros, Ones, Xavier, Normal };

// Owns every parameter of a model; names are unique.
class ParameterStore {
 public:
  Parameter& create(const std::string& name, std::size_t rows, std::size_t cols, Init init,
                    Rng& rng, float normal_std = 0.02f);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  std::size_t count() const;

  void zero_grad();

  // Binary format: "VRVW", u32 version, u32 count, then per tensor u32 name
  // length, name bytes, u64 rows, u64 cols, float32 data (little endian).
  void save(const std::filesystem::path& file) const;
  // Loads into already-created parameters; shapes and names must match.
  void load(const std::filesystem::path& file);

  // Digest of all values, for reproducibility checks.
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

}  // namespace verve::nn
