// Uniform-grid index over item bounding boxes.  Good enough for the
// candidate lookups this library needs (edges near a polygon, edges near an
// edge): build once, query by box, get a deduplicated id list back.
// Queries are const and safe to run from several threads at once.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "routeval/geom.hpp"

namespace routeval::geom {

class GridIndex {
  public:
    // cell_size controls bucketing granularity; items and queries may span
    // several buckets.
    explicit GridIndex(double cell_size) : cell_(cell_size > 0 ? cell_size : 1.0) {}

    void insert(std::uint32_t id, const BBox& box) {
        if (!box.valid()) return;
        boxes_.resize(std::max<std::size_t>(boxes_.size(), id + 1));
        boxes_[id] = box;
        for_each_bucket(box, [&](std::uint64_t key) { buckets_[key].push_back(id); });
    }

    // Ids whose box intersects `query`, each reported once, ascending.
    std::vector<std::uint32_t> query(const BBox& query) const {
        std::vector<std::uint32_t> out;
        if (!query.valid()) return out;
        for_each_bucket(query, [&](std::uint64_t key) {
            auto it = buckets_.find(key);
            if (it == buckets_.end()) return;
            for (std::uint32_t id : it->second) {
                if (boxes_[id].intersects(query)) out.push_back(id);
            }
        });
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

  private:
    template <typename F>
    void for_each_bucket(const BBox& box, F&& f) const {
        auto ix0 = static_cast<std::int64_t>(std::floor(box.lo.x / cell_));
        auto iy0 = static_cast<std::int64_t>(std::floor(box.lo.y / cell_));
        auto ix1 = static_cast<std::int64_t>(std::floor(box.hi.x / cell_));
        auto iy1 = static_cast<std::int64_t>(std::floor(box.hi.y / cell_));
        for (std::int64_t ix = ix0; ix <= ix1; ++ix)
            for (std::int64_t iy = iy0; iy <= iy1; ++iy)
                f((static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
                  static_cast<std::uint32_t>(iy));
    }

    double cell_;
    std::vector<BBox> boxes_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

}  // namespace routeval::geom
