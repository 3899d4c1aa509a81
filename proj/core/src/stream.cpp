#include "lpsum/stream.hpp"

#include <memory>
#include <stdexcept>

namespace lpsum {

RowBlockStream::RowBlockStream(std::size_t width, std::size_t block_size, Source next)
    : width_(width), block_size_(block_size), next_(std::move(next)),
      rows_seen_(0), done_(false) {
    if (block_size_ == 0) {
        throw std::invalid_argument("RowBlockStream: block size must be >= 1");
    }
}

std::optional<MatrixF> RowBlockStream::next_block() {
    if (done_) return std::nullopt;
    auto blk = next_(block_size_);
    if (!blk.has_value() || blk->rows() == 0) {
        done_ = true;
        return std::nullopt;
    }
    if (blk->cols() != width_) {
        throw std::runtime_error("RowBlockStream: source yielded width " +
                                 std::to_string(blk->cols()) + ", expected " +
                                 std::to_string(width_));
    }
    if (blk->rows() > block_size_) {
        throw std::runtime_error("RowBlockStream: source yielded oversize block");
    }
    rows_seen_ += blk->rows();
    return blk;
}

RowBlockStream block_iter(const MatrixF& m, std::size_t b) {
    auto cursor = std::make_shared<std::size_t>(0);
    // Copies the matrix into the closure; streams at this scale are cheap and
    // the source must outlive the stream.
    MatrixF copy = m;
    return RowBlockStream(
        m.cols(), b,
        [copy = std::move(copy), cursor](std::size_t want) -> std::optional<MatrixF> {
            if (*cursor >= copy.rows()) return std::nullopt;
            const std::size_t take = std::min(want, copy.rows() - *cursor);
            MatrixF blk = copy.row_block(*cursor, take);
            *cursor += take;
            return blk;
        });
}

MatrixF collect(RowBlockStream& s) {
    MatrixF all(0, s.width());
    while (auto blk = s.next_block()) {
        all.append_rows(*blk);
    }
    return all;
}

}  // namespace lpsum
