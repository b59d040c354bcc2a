/* Copyright 2026 The smx Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "smx/tensor.hpp"

namespace smx {

/// A named parameter. Vectors (bias, gamma) are stored as (len,1,1,1)
/// tensors with rank 1; the leading `rank` extents are the logical dims.
template <typename T>
struct Param {
  std::string name;
  std::size_t rank = 4;
  Tensor4<T> value;

  std::vector<std::uint32_t> dims() const {
    const Shape4& s = value.shape();
    const std::size_t all[4] = {s.n, s.c, s.h, s.w};
    std::vector<std::uint32_t> d;
    for (std::size_t i = 0; i < rank; ++i) d.push_back(static_cast<std::uint32_t>(all[i]));
    return d;
  }

  friend bool operator==(const Param&, const Param&) = default;
};

/// Ordered, uniquely named parameter collection. Insertion order is the
/// canonical order used for serialization and iteration.
template <typename T>
class ParamTree {
 public:
  using iterator = typename std::vector<Param<T>>::iterator;
  using const_iterator = typename std::vector<Param<T>>::const_iterator;

  void add(std::string name, std::size_t rank, Tensor4<T> value) {
    if (index_.count(name) != 0) {
      throw ConfigError("ParamTree: duplicate parameter name '" + name + "'");
    }
    if (rank < 1 || rank > 4) {
      throw ConfigError("ParamTree: rank must be in 1..4 for '" + name + "'");
    }
    index_.emplace(name, params_.size());
    params_.push_back(Param<T>{std::move(name), rank, std::move(value)});
  }

  std::size_t size() const noexcept { return params_.size(); }
  bool empty() const noexcept { return params_.empty(); }

  iterator begin() noexcept { return params_.begin(); }
  iterator end() noexcept { return params_.end(); }
  const_iterator begin() const noexcept { return params_.begin(); }
  const_iterator end() const noexcept { return params_.end(); }

  Param<T>& operator[](std::size_t i) { return params_[i]; }
  const Param<T>& operator[](std::size_t i) const { return params_[i]; }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t index_of(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("ParamTree: no parameter named '" + name + "'");
    return it->second;
  }

  Tensor4<T>& at(const std::string& name) { return params_[index_of(name)].value; }
  const Tensor4<T>& at(const std::string& name) const { return params_[index_of(name)].value; }

  /// Total number of scalars across all parameters.
  std::size_t scalar_count() const noexcept {
    std::size_t total = 0;
    for (const auto& p : params_) total += p.value.size();
    return total;
  }

  ParamTree zeros_like() const {
    ParamTree out;
    for (const auto& p : params_) out.add(p.name, p.rank, Tensor4<T>(p.value.shape()));
    return out;
  }

  template <typename U>
  ParamTree<U> cast() const {
    ParamTree<U> out;
    for (const auto& p : params_) out.add(p.name, p.rank, p.value.template cast<U>());
    return out;
  }

  friend bool operator==(const ParamTree& a, const ParamTree& b) { return a.params_ == b.params_; }

 private:
  std::vector<Param<T>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace smx
