#include "symflow/transition_matrix.hpp"

#include <fstream>
#include <sstream>

namespace symflow::sft {

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<int>>& rows) {
    n_ = static_cast<int>(rows.size());
    if (n_ < 1) throw NonSquareError("transition matrix must have N >= 1");
    entries_.assign(static_cast<std::size_t>(n_) * n_, 0);
    for (int i = 0; i < n_; ++i) {
        if (static_cast<int>(rows[i].size()) != n_)
            throw NonSquareError("row " + std::to_string(i) + " has " +
                                 std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n_));
        for (int j = 0; j < n_; ++j) {
            const int v = rows[i][j];
            if (v != 0 && v != 1)
                throw Error("transition matrix entries must be 0 or 1");
            entries_[static_cast<std::size_t>(i) * n_ + j] = static_cast<std::uint8_t>(v);
        }
    }
    succ_.resize(n_);
    pred_.resize(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (allows(i, j)) {
                succ_[i].push_back(j);
                pred_[j].push_back(i);
            }
    for (int i = 0; i < n_; ++i) {
        if (succ_[i].empty()) throw EmptyRowOrColumnError("row " + std::to_string(i) + " is all zeros");
        if (pred_[i].empty()) throw EmptyRowOrColumnError("column " + std::to_string(i) + " is all zeros");
    }
}

TransitionMatrix TransitionMatrix::full_shift(int n) {
    return TransitionMatrix(std::vector<std::vector<int>>(n, std::vector<int>(n, 1)));
}

TransitionMatrix TransitionMatrix::golden_mean() {
    return TransitionMatrix({{1, 1}, {1, 0}});
}

TransitionMatrix TransitionMatrix::parse(std::istream& in) {
    int n = 0;
    if (!(in >> n)) throw ParseError("matrix file: missing size line");
    if (n < 1) throw ParseError("matrix file: size must be >= 1");
    std::vector<std::vector<int>> rows(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!(in >> rows[i][j]))
                throw ParseError("matrix file: row " + std::to_string(i) + " is incomplete");
    return TransitionMatrix(rows);
}

TransitionMatrix TransitionMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path);
    return parse(in);
}

std::string TransitionMatrix::to_text() const {
    std::ostringstream out;
    out << n_ << "\n";
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) out << (j ? " " : "") << (allows(i, j) ? 1 : 0);
        out << "\n";
    }
    return out.str();
}

bool TransitionMatrix::admissible(const Word& w) const {
    if (w.empty()) return false;
    for (const Symbol s : w)
        if (s < 0 || s >= n_) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!allows(w[i], w[i + 1])) return false;
    return true;
}

bool TransitionMatrix::cyclically_admissible(const Word& w) const {
    return admissible(w) && allows(w.back(), w.front());
}

std::vector<Word> TransitionMatrix::words(int n) const {
    if (n < 1) throw Error("words: length must be >= 1");
    std::vector<Word> out;
    Word current;
    current.reserve(n);
    auto dfs = [&](auto&& self, int depth) -> void {
        if (depth == n) {
            out.push_back(current);
            return;
        }
        if (depth == 0) {
            for (Symbol s = 0; s < n_; ++s) {
                current.push_back(s);
                self(self, 1);
                current.pop_back();
            }
        } else {
            for (const Symbol s : succ_[current.back()]) {
                current.push_back(s);
                self(self, depth + 1);
                current.pop_back();
            }
        }
    };
    dfs(dfs, 0);
    return out;
}

} // namespace symflow::sft
