#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace malstat {

/// One n-gram. Parts are kept as a tuple; `text()` is the concatenated
/// rendering used for display and CSV column names (e.g. int3movpush).
struct GramToken {
  std::vector<std::string> parts;

  std::string text() const;
  bool operator==(const GramToken&) const = default;
  /// Lexicographic order on the part tuple (total order used everywhere a
  /// tie-break is needed).
  bool operator<(const GramToken& other) const { return parts < other.parts; }
};

using Sequence = std::vector<std::string>;

/// Contiguous n-grams of a sequence, in order; empty when the sequence is
/// shorter than n.
std::vector<GramToken> ngrams(const Sequence& seq, int n);

/// API-call n-grams: 1-grams are the names themselves, 2-grams the adjacent
/// pairs in import-table order. n must be 1 or 2.
std::vector<GramToken> api_ngrams(const Sequence& api_calls, int n);

struct NgramVocabulary {
  int n = 0;
  std::vector<GramToken> tokens;
  std::string source;  // "opcode" or "api"
};

/// Per class: rank n-grams by total occurrence count across the class's
/// sequences (ties by lexicographic token order), take the top `per_class`,
/// then merge the class lists in the given order with duplicates removed.
/// Throws when a class yields no n-grams of length n, naming the class.
NgramVocabulary mine_vocabulary(
    const std::vector<std::pair<std::string, std::vector<Sequence>>>& sequences_by_class, int n,
    int per_class = 100, const std::string& source = "opcode");

/// Presence vector over the vocabulary: component i is 1 iff vocabulary
/// token i ranks among the file's own `top_k` most frequent n-grams
/// (file-internal ranking, count then lexicographic ties). Files with fewer
/// distinct n-grams use all of them.
std::vector<std::uint8_t> presence_vector(const Sequence& seq, const NgramVocabulary& vocab,
                                          int top_k = 100);

/// Fraction of a class's sequences containing the n-gram at least once.
/// Throws on an empty class.
double class_frequency(const GramToken& ngram, const std::vector<Sequence>& class_files);

/// Text persistence: header line `n=<n> source=<src>`, then one token per
/// line with its parts space-separated.
void save_vocabulary(const NgramVocabulary& vocab, const std::string& path);
NgramVocabulary load_vocabulary(const std::string& path);

}  // namespace malstat
