#ifndef HETNET_COMMON_HPP
#define HETNET_COMMON_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnet {

/// Raised when inputs do not fit together (unknown ids, out-of-domain values,
/// malformed scenario files).
class StructuralError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an exhaustive routine is asked to enumerate a space that is
/// too large.
class CapacityError : public std::length_error
{
public:
    using std::length_error::length_error;
};

/// Dense zero-based identifier; the tag keeps base-station and user ids
/// from being mixed up.
template <typename Tag>
struct Id
{
    std::uint32_t value{};

    constexpr Id() = default;
    constexpr explicit Id(std::uint32_t v) : value(v) {}
    constexpr explicit Id(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}
    constexpr explicit Id(int v) : value(static_cast<std::uint32_t>(v)) {}

    constexpr std::size_t index() const { return value; }
    constexpr auto operator<=>(const Id&) const = default;
};

using BsId = Id<struct BsTag>;
using UserId = Id<struct UserTag>;

/// Row-major matrix indexed (base station, user).
template <typename T>
class Grid
{
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T init = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, init)
    {
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    T& operator()(BsId b, UserId u) { return (*this)(b.index(), u.index()); }
    const T& operator()(BsId b, UserId u) const { return (*this)(b.index(), u.index()); }

    bool operator==(const Grid&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// splitmix64 finalizer; used to derive independent seeds from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    return mix_seed(master ^ mix_seed(stream + 0x5851f42d4c957f2dULL));
}

} // namespace hetnet

#endif
