#include "malstat/huffman.hpp"

#include <queue>
#include <vector>

#include "malstat/error.hpp"

namespace malstat {

namespace {

struct Node {
  std::uint64_t weight = 0;
  int min_symbol = 256;  // smallest byte value in the subtree, for tie order
  int left = -1;
  int right = -1;
  int symbol = -1;  // leaf only
};

}  // namespace

HuffmanTable huffman_from_counts(const std::array<std::uint64_t, 256>& counts) {
  std::vector<Node> nodes;
  using Key = std::pair<std::uint64_t, int>;  // (weight, min symbol)
  auto cmp = [&nodes](int a, int b) {
    Key ka{nodes[a].weight, nodes[a].min_symbol};
    Key kb{nodes[b].weight, nodes[b].min_symbol};
    return ka > kb;
  };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> queue(cmp);

  for (int b = 0; b < 256; ++b) {
    if (counts[b] == 0) continue;
    Node n;
    n.weight = counts[b];
    n.min_symbol = b;
    n.symbol = b;
    nodes.push_back(n);
    queue.push(static_cast<int>(nodes.size()) - 1);
  }
  if (nodes.empty()) throw Error("huffman_lengths: empty input");

  HuffmanTable table;
  if (nodes.size() == 1) {
    table.lengths[nodes[0].symbol] = 1;
    return table;
  }

  while (queue.size() > 1) {
    int a = queue.top(); queue.pop();
    int b = queue.top(); queue.pop();
    Node merged;
    merged.weight = nodes[a].weight + nodes[b].weight;
    merged.min_symbol = std::min(nodes[a].min_symbol, nodes[b].min_symbol);
    merged.left = a;
    merged.right = b;
    nodes.push_back(merged);
    queue.push(static_cast<int>(nodes.size()) - 1);
  }

  // Depth-first depth assignment from the root.
  std::vector<std::pair<int, int>> stack;  // (node, depth)
  stack.emplace_back(queue.top(), 0);
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    const Node& n = nodes[idx];
    if (n.symbol >= 0) {
      table.lengths[n.symbol] = depth;
      continue;
    }
    stack.emplace_back(n.left, depth + 1);
    stack.emplace_back(n.right, depth + 1);
  }
  return table;
}

HuffmanTable huffman_lengths(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error("huffman_lengths: empty input");
  std::array<std::uint64_t, 256> counts{};
  for (std::uint8_t b : bytes) counts[b]++;
  return huffman_from_counts(counts);
}

}  // namespace malstat
