#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tgraph/batch.hpp"
#include "tgraph/hooks.hpp"
#include "tgraph/view.hpp"

namespace tgraph {

/// Iterates a view under one batch spec, materializing each batch through the
/// manager's recipe for `key` as it is reached.
class DataLoader {
 public:
  DataLoader(const GraphView& view, const BatchSpec& spec, HookManager& manager, std::string key)
      : slices_(iterate(view, spec)), manager_(&manager), key_(std::move(key)) {
    manager_->recipe(key_);
  }

  std::size_t size() const { return slices_.size(); }
  const std::vector<EventSlice>& slices() const { return slices_; }

  MaterializedBatch at(std::size_t i) const { return materialize(slices_.at(i), *manager_, key_); }

  class iterator {
   public:
    using value_type = MaterializedBatch;
    using difference_type = std::ptrdiff_t;

    iterator(const DataLoader* loader, std::size_t pos) : loader_(loader), pos_(pos) {}
    MaterializedBatch operator*() const { return loader_->at(pos_); }
    iterator& operator++() {
      ++pos_;
      return *this;
    }
    bool operator==(const iterator& other) const { return pos_ == other.pos_; }

   private:
    const DataLoader* loader_;
    std::size_t pos_;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, slices_.size()}; }

 private:
  std::vector<EventSlice> slices_;
  HookManager* manager_;
  std::string key_;
};

}  // namespace tgraph
