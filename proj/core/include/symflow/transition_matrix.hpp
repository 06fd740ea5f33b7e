#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "symflow/errors.hpp"

namespace symflow::sft {

using Symbol = int;
using Word = std::vector<Symbol>;

// 0/1 square matrix defining a one-step two-sided subshift of finite type.
// Validation guarantees every symbol has at least one successor and one
// predecessor, so bi-infinite admissible sequences pass through every symbol.
class TransitionMatrix {
  public:
    explicit TransitionMatrix(const std::vector<std::vector<int>>& rows);

    static TransitionMatrix full_shift(int n);
    static TransitionMatrix golden_mean(); // [[1,1],[1,0]]

    // Text format: first line N, then N rows of space-separated 0/1.
    static TransitionMatrix parse(std::istream& in);
    static TransitionMatrix load(const std::string& path);
    std::string to_text() const;

    int size() const { return n_; }
    bool allows(Symbol a, Symbol b) const { return entries_[static_cast<std::size_t>(a) * n_ + b] != 0; }
    const std::vector<Symbol>& successors(Symbol a) const { return succ_[a]; }
    const std::vector<Symbol>& predecessors(Symbol b) const { return pred_[b]; }

    bool admissible(const Word& w) const;
    bool cyclically_admissible(const Word& w) const;

    // All admissible words of length n, lexicographically sorted.
    std::vector<Word> words(int n) const;

    friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
        return a.n_ == b.n_ && a.entries_ == b.entries_;
    }

  private:
    int n_ = 0;
    std::vector<std::uint8_t> entries_;
    std::vector<std::vector<Symbol>> succ_;
    std::vector<std::vector<Symbol>> pred_;
};

} // namespace symflow::sft
