#include "malstat/ngrams.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "malstat/error.hpp"
#include "malstat/parallel.hpp"
#include "malstat/text_util.hpp"

namespace malstat {

namespace {

// Internal key: parts joined by 0x1F. The separator sorts below every
// printable byte, so key order equals tuple order.
constexpr char kSep = '\x1F';

std::string key_of(const Sequence& seq, size_t begin, int n) {
  std::string key;
  for (int i = 0; i < n; ++i) {
    if (i) key += kSep;
    key += seq[begin + i];
  }
  return key;
}

GramToken token_from_key(const std::string& key) {
  GramToken t;
  t.parts = split(key, kSep);
  return t;
}

std::string key_of_token(const GramToken& t) {
  std::string key;
  for (size_t i = 0; i < t.parts.size(); ++i) {
    if (i) key += kSep;
    key += t.parts[i];
  }
  return key;
}

// Occurrence counts of all n-grams in one sequence.
std::map<std::string, std::uint64_t> count_grams(const Sequence& seq, int n) {
  std::map<std::string, std::uint64_t> counts;
  if (n < 1 || seq.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + n <= seq.size(); ++i) counts[key_of(seq, i, n)]++;
  return counts;
}

std::vector<std::string> top_keys(const std::map<std::string, std::uint64_t>& counts, int limit) {
  std::vector<std::pair<std::string, std::uint64_t>> items(counts.begin(), counts.end());
  // Count descending; the map already yields keys in lexicographic order, so
  // a stable sort keeps that order inside each count bucket.
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> keys;
  keys.reserve(std::min<size_t>(items.size(), limit));
  for (const auto& [key, cnt] : items) {
    if (static_cast<int>(keys.size()) >= limit) break;
    keys.push_back(key);
  }
  return keys;
}

}  // namespace

std::string GramToken::text() const {
  std::string out;
  for (const std::string& p : parts) out += p;
  return out;
}

std::vector<GramToken> ngrams(const Sequence& seq, int n) {
  std::vector<GramToken> out;
  if (n < 1 || seq.size() < static_cast<size_t>(n)) return out;
  out.reserve(seq.size() - n + 1);
  for (size_t i = 0; i + n <= seq.size(); ++i) {
    GramToken t;
    t.parts.assign(seq.begin() + i, seq.begin() + i + n);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<GramToken> api_ngrams(const Sequence& api_calls, int n) {
  if (n != 1 && n != 2) throw Error("api_ngrams: n must be 1 or 2");
  return ngrams(api_calls, n);
}

NgramVocabulary mine_vocabulary(
    const std::vector<std::pair<std::string, std::vector<Sequence>>>& sequences_by_class, int n,
    int per_class, const std::string& source) {
  if (sequences_by_class.size() < 2) throw Error("mine_vocabulary: need at least 2 classes");
  if (per_class < 1) throw Error("mine_vocabulary: per_class must be >= 1");

  NgramVocabulary vocab;
  vocab.n = n;
  vocab.source = source;

  std::set<std::string> seen;
  for (const auto& [class_name, sequences] : sequences_by_class) {
    // Map phase per sequence, serialized class-level reduce.
    std::vector<std::map<std::string, std::uint64_t>> per_seq(sequences.size());
    par::for_index_dynamic(static_cast<std::int64_t>(sequences.size()),
                           [&](std::int64_t i) { per_seq[i] = count_grams(sequences[i], n); });
    std::map<std::string, std::uint64_t> totals;
    for (const auto& counts : per_seq) {
      for (const auto& [key, cnt] : counts) totals[key] += cnt;
    }
    if (totals.empty()) {
      throw Error("mine_vocabulary: class " + class_name + " has no " + std::to_string(n) + "-grams");
    }
    for (const std::string& key : top_keys(totals, per_class)) {
      if (seen.insert(key).second) vocab.tokens.push_back(token_from_key(key));
    }
  }
  return vocab;
}

std::vector<std::uint8_t> presence_vector(const Sequence& seq, const NgramVocabulary& vocab,
                                          int top_k) {
  if (vocab.tokens.empty()) throw Error("presence_vector: empty vocabulary");
  std::vector<std::uint8_t> out(vocab.tokens.size(), 0);
  std::map<std::string, std::uint64_t> counts = count_grams(seq, vocab.n);
  if (counts.empty()) return out;
  std::set<std::string> file_top;
  for (std::string& key : top_keys(counts, top_k)) file_top.insert(std::move(key));
  for (size_t i = 0; i < vocab.tokens.size(); ++i) {
    if (file_top.count(key_of_token(vocab.tokens[i]))) out[i] = 1;
  }
  return out;
}

double class_frequency(const GramToken& ngram, const std::vector<Sequence>& class_files) {
  if (class_files.empty()) throw Error("class_frequency: empty class");
  const int n = static_cast<int>(ngram.parts.size());
  std::vector<char> contains(class_files.size(), 0);
  par::for_index_dynamic(static_cast<std::int64_t>(class_files.size()), [&](std::int64_t f) {
    const Sequence& seq = class_files[f];
    if (seq.size() < static_cast<size_t>(n)) return;
    for (size_t i = 0; i + n <= seq.size(); ++i) {
      bool match = true;
      for (int j = 0; j < n; ++j) {
        if (seq[i + j] != ngram.parts[j]) { match = false; break; }
      }
      if (match) { contains[f] = 1; return; }
    }
  });
  std::uint64_t hits = 0;
  for (char c : contains) hits += c;
  return static_cast<double>(hits) / static_cast<double>(class_files.size());
}

void save_vocabulary(const NgramVocabulary& vocab, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "n=" << vocab.n << " source=" << vocab.source << "\n";
  for (const GramToken& t : vocab.tokens) {
    for (size_t i = 0; i < t.parts.size(); ++i) {
      if (i) out << ' ';
      out << encode_token(t.parts[i]);
    }
    out << "\n";
  }
}

NgramVocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty vocabulary file");
  NgramVocabulary vocab;
  {
    auto fields = split(trim(line), ' ');
    for (const std::string& f : fields) {
      auto kv = split(f, '=');
      if (kv.size() != 2) throw ParseError(path + ": bad vocabulary header");
      long long v = 0;
      if (kv[0] == "n") {
        if (!parse_int(kv[1], v)) throw ParseError(path + ": bad n in header");
        vocab.n = static_cast<int>(v);
      } else if (kv[0] == "source") {
        vocab.source = kv[1];
      }
    }
    if (vocab.n < 1) throw ParseError(path + ": bad vocabulary header");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    GramToken t;
    for (const std::string& part : split(trim(line), ' ')) t.parts.push_back(decode_token(part));
    if (static_cast<int>(t.parts.size()) != vocab.n) {
      throw ParseError(path + ": token arity does not match header n");
    }
    vocab.tokens.push_back(std::move(t));
  }
  return vocab;
}

}  // namespace malstat
