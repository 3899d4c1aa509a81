#pragma once

#include <functional>
#include <optional>

#include "lpsum/matrix.hpp"

namespace lpsum {

/// Single-pass source of row blocks of a fixed-width matrix. Every yielded
/// block has between 1 and block_size rows, and concatenating all blocks in
/// order reproduces the source rows.
class RowBlockStream {
public:
    /// `next` returns up to `want` rows, empty optional at end of stream.
    using Source = std::function<std::optional<MatrixF>(std::size_t want)>;

    RowBlockStream(std::size_t width, std::size_t block_size, Source next);

    std::size_t width() const noexcept { return width_; }
    std::size_t block_size() const noexcept { return block_size_; }

    /// Next block, or nullopt once the source is exhausted.
    std::optional<MatrixF> next_block();

    /// Rows yielded so far.
    std::size_t rows_seen() const noexcept { return rows_seen_; }

private:
    std::size_t width_;
    std::size_t block_size_;
    Source next_;
    std::size_t rows_seen_;
    bool done_;
};

/// Stream over an in-memory matrix: ceil(n/b) blocks, last one may be short.
RowBlockStream block_iter(const MatrixF& m, std::size_t b);

/// Drain a stream back into one matrix (test and driver convenience).
MatrixF collect(RowBlockStream& s);

}  // namespace lpsum
