#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqs {

// Process identifiers are small dense integers; external labels live in the io layer.
using ProcessId = int;
inline constexpr int kMaxProcesses = 64;
inline constexpr ProcessId kNoProcess = -1;

enum class ErrorCode {
    EmptyQuorum,
    EmptyDeclaration,
    UnknownMember,
    UnknownProcess,
    PreconditionViolated,
    BadSubset,
    TooLarge,
    PreconditionNotVerified,
    ForgedSender,
    ForgedSigner,
    InputError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// A set of processes backed by a 64-bit mask.
class ProcSet {
public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = ProcessId;
        using difference_type = std::ptrdiff_t;
        using pointer = const ProcessId*;
        using reference = ProcessId;

        iterator() = default;
        explicit iterator(std::uint64_t rest) : rest_(rest) {}
        ProcessId operator*() const { return std::countr_zero(rest_); }
        iterator& operator++() {
            rest_ &= rest_ - 1;
            return *this;
        }
        iterator operator++(int) {
            iterator tmp = *this;
            ++*this;
            return tmp;
        }
        bool operator==(const iterator& o) const { return rest_ == o.rest_; }

    private:
        std::uint64_t rest_ = 0;
    };

    constexpr ProcSet() = default;
    ProcSet(std::initializer_list<ProcessId> ids);
    static constexpr ProcSet from_bits(std::uint64_t bits) {
        ProcSet s;
        s.bits_ = bits;
        return s;
    }
    static ProcSet of(const std::vector<ProcessId>& ids);
    static ProcSet single(ProcessId p);

    std::uint64_t bits() const { return bits_; }
    bool empty() const { return bits_ == 0; }
    int size() const { return std::popcount(bits_); }
    bool contains(ProcessId p) const { return p >= 0 && p < kMaxProcesses && ((bits_ >> p) & 1u); }
    void insert(ProcessId p);
    void erase(ProcessId p);
    ProcessId min() const { return empty() ? kNoProcess : std::countr_zero(bits_); }

    bool subset_of(ProcSet o) const { return (bits_ & ~o.bits_) == 0; }
    bool strict_subset_of(ProcSet o) const { return subset_of(o) && bits_ != o.bits_; }
    bool intersects(ProcSet o) const { return (bits_ & o.bits_) != 0; }

    ProcSet operator&(ProcSet o) const { return from_bits(bits_ & o.bits_); }
    ProcSet operator|(ProcSet o) const { return from_bits(bits_ | o.bits_); }
    ProcSet operator-(ProcSet o) const { return from_bits(bits_ & ~o.bits_); }
    ProcSet& operator&=(ProcSet o) { bits_ &= o.bits_; return *this; }
    ProcSet& operator|=(ProcSet o) { bits_ |= o.bits_; return *this; }
    ProcSet& operator-=(ProcSet o) { bits_ &= ~o.bits_; return *this; }
    bool operator==(const ProcSet& o) const = default;

    iterator begin() const { return iterator(bits_); }
    iterator end() const { return iterator(0); }
    std::vector<ProcessId> members() const;
    std::string str() const;  // "{1,2,4}"

private:
    std::uint64_t bits_ = 0;
};

// Lexicographic order on ascending member lists; the canonical quorum order.
bool canonical_less(ProcSet a, ProcSet b);

struct CanonicalLess {
    bool operator()(ProcSet a, ProcSet b) const { return canonical_less(a, b); }
};

// An antichain of quorums in canonical order.
using QuorumSet = std::vector<ProcSet>;

// Sorts, dedups and drops strict supersets of sibling quorums.
QuorumSet normalize(QuorumSet qs);
bool is_antichain(const QuorumSet& qs);
ProcSet union_of(const QuorumSet& qs);
bool contains_quorum(const QuorumSet& qs, ProcSet q);
std::string quorums_str(const QuorumSet& qs);  // "{{1,2},{2,3}}"

}  // namespace hqs
