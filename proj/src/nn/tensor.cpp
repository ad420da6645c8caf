#include "verve/nn/tensor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace verve::nn {

Parameter& ParameterStore::create(const std::string& name, std::size_t rows, std::size_t cols,
                                  Init init, Rng& rng, float normal_std) {
  if (contains(name)) throw std::logic_error("duplicate parameter " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Matrix(rows, cols);
  p->grad = Matrix(rows, cols);
  p->m = Matrix(rows, cols);
  p->v = Matrix(rows, cols);
  switch (init) {
    case Init::Zeros:
      break;
    case Init::Ones:
      std::fill(p->value.data.begin(), p->value.data.end(), 1.0f);
      break;
    case Init::Xavier: {
      const float bound = std::sqrt(6.0f / static_cast<float>(rows + cols));
      std::uniform_real_distribution<float> dist(-bound, bound);
      for (float& x : p->value.data) x = dist(rng);
      break;
    }
    case Init::Normal: {
      std::normal_distribution<float> dist(0.0f, normal_std);
      for (float& x : p->value.data) x = dist(rng);
      break;
    }
  }
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParameterStore::get(const std::string& name) {
  for (auto& p : params_)
    if (p->name == name) return *p;
  throw std::out_of_range("no parameter " + name);
}

const Parameter& ParameterStore::get(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name == name) return *p;
  throw std::out_of_range("no parameter " + name);
}

bool ParameterStore::contains(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name == name) return true;
  return false;
}

std::vector<Parameter*> ParameterStore::all() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::size_t ParameterStore::count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->grad.zero();
}

namespace {

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated weights file");
  return v;
}

}  // namespace

void ParameterStore::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.write("VRVW", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params_.size()));
  for (const auto& p : params_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put<std::uint64_t>(out, p->value.rows);
    put<std::uint64_t>(out, p->value.cols);
    out.write(reinterpret_cast<const char*>(p->value.data.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(float)));
  }
}

void ParameterStore::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "VRVW", 4) != 0) throw std::runtime_error("not a weights file: " + file.string());
  if (take<std::uint32_t>(in) != 1) throw std::runtime_error("unsupported weights version");
  const auto n = take<std::uint32_t>(in);
  if (n != params_.size()) throw std::runtime_error("parameter count mismatch in " + file.string());
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto len = take<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto rows = take<std::uint64_t>(in);
    const auto cols = take<std::uint64_t>(in);
    Parameter& p = get(name);
    if (p.value.rows != rows || p.value.cols != cols)
      throw std::runtime_error("shape mismatch for parameter " + name);
    in.read(reinterpret_cast<char*>(p.value.data.data()),
            static_cast<std::streamsize>(p.value.size() * sizeof(float)));
    if (!in) throw std::runtime_error("truncated weights file");
  }
}

std::uint64_t ParameterStore::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : params_) {
    for (float f : p->value.data) {
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof bits);
      h = (h ^ bits) * 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace verve::nn
