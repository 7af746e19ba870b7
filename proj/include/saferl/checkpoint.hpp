#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "saferl/mlp.hpp"
#include "saferl/rnn.hpp"

namespace saferl {

// Checkpoint container, shared by Q-networks and the lookahead predictor.
//
//   bytes 0..7   magic "SRLNET1\0"
//   u32          kind: 1 = feedforward, 2 = recurrent
//   u32          block count
//   u32 x 3      meta (recurrent: history, horizon, state_dim; else zeros)
//   per block:   u32 rows, u32 cols, rows*cols f64, row-major
//
// All integers and doubles little-endian.
enum class CheckpointKind : std::uint32_t { Mlp = 1, Rnn = 2 };

namespace detail {

inline constexpr char kCkptMagic[8] = {'S', 'R', 'L', 'N', 'E', 'T', '1', '\0'};

inline void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = char((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("checkpoint: truncated header");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

inline void put_f64(std::ostream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = char((bits >> (8 * i)) & 0xff);
    out.write(b, 8);
}

inline double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("checkpoint: truncated block");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

inline void put_block(std::ostream& out, const Eigen::MatrixXd& m) {
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

inline Eigen::MatrixXd get_block(std::istream& in) {
    std::uint32_t rows = get_u32(in);
    std::uint32_t cols = get_u32(in);
    Eigen::MatrixXd m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = get_f64(in);
    return m;
}

inline void write_header(std::ostream& out, CheckpointKind kind, std::uint32_t blocks,
                         std::uint32_t m0, std::uint32_t m1, std::uint32_t m2) {
    out.write(kCkptMagic, 8);
    put_u32(out, static_cast<std::uint32_t>(kind));
    put_u32(out, blocks);
    put_u32(out, m0);
    put_u32(out, m1);
    put_u32(out, m2);
}

struct CkptHeader {
    CheckpointKind kind;
    std::uint32_t blocks, m0, m1, m2;
};

inline CkptHeader read_header(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCkptMagic, 8) != 0)
        throw std::runtime_error("checkpoint: bad magic");
    CkptHeader h{};
    std::uint32_t kind = get_u32(in);
    if (kind != 1 && kind != 2) throw std::runtime_error("checkpoint: unknown kind");
    h.kind = static_cast<CheckpointKind>(kind);
    h.blocks = get_u32(in);
    h.m0 = get_u32(in);
    h.m1 = get_u32(in);
    h.m2 = get_u32(in);
    return h;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const MlpParams& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    detail::write_header(out, CheckpointKind::Mlp, static_cast<std::uint32_t>(2 * p.w.size()), 0, 0, 0);
    for (std::size_t l = 0; l < p.w.size(); ++l) {
        detail::put_block(out, p.w[l]);
        detail::put_block(out, p.b[l]);
    }
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

inline void save_checkpoint(const std::string& path, const RnnParams& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    detail::write_header(out, CheckpointKind::Rnn, 5, static_cast<std::uint32_t>(p.history),
                         static_cast<std::uint32_t>(p.horizon), static_cast<std::uint32_t>(p.state_dim));
    detail::put_block(out, p.wx);
    detail::put_block(out, p.wh);
    detail::put_block(out, p.bh);
    detail::put_block(out, p.wo);
    detail::put_block(out, p.bo);
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

inline CheckpointKind peek_checkpoint_kind(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    return detail::read_header(in).kind;
}

inline MlpParams load_mlp_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    auto h = detail::read_header(in);
    if (h.kind != CheckpointKind::Mlp)
        throw std::runtime_error("checkpoint is not a feedforward network: " + path);
    if (h.blocks % 2 != 0) throw std::runtime_error("checkpoint: odd block count");
    MlpParams p;
    for (std::uint32_t l = 0; l < h.blocks / 2; ++l) {
        p.w.push_back(detail::get_block(in));
        Eigen::MatrixXd b = detail::get_block(in);
        if (b.cols() != 1 || b.rows() != p.w.back().rows())
            throw std::runtime_error("checkpoint: bias shape mismatch");
        p.b.push_back(b.col(0));
    }
    for (std::size_t l = 1; l < p.w.size(); ++l)
        if (p.w[l].cols() != p.w[l - 1].rows())
            throw std::runtime_error("checkpoint: layer dimensions do not chain");
    return p;
}

inline RnnParams load_rnn_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    auto h = detail::read_header(in);
    if (h.kind != CheckpointKind::Rnn)
        throw std::runtime_error("checkpoint is not a recurrent network: " + path);
    if (h.blocks != 5) throw std::runtime_error("checkpoint: unexpected block count");
    RnnParams p;
    p.history = static_cast<int>(h.m0);
    p.horizon = static_cast<int>(h.m1);
    p.state_dim = static_cast<int>(h.m2);
    p.wx = detail::get_block(in);
    p.wh = detail::get_block(in);
    Eigen::MatrixXd bh = detail::get_block(in);
    p.wo = detail::get_block(in);
    Eigen::MatrixXd bo = detail::get_block(in);
    p.bh = bh.col(0);
    p.bo = bo.col(0);
    if (p.wh.rows() != p.wx.rows() || p.wh.cols() != p.wx.rows() || p.wo.cols() != p.wx.rows() ||
        p.bh.rows() != p.wx.rows() || p.bo.rows() != p.wo.rows() ||
        p.wo.rows() != p.horizon * p.state_dim)
        throw std::runtime_error("checkpoint: recurrent shapes do not chain");
    return p;
}

}  // namespace saferl
