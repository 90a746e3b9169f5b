#include "aperture_forge/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aperture_forge/error.hpp"

namespace apf {

MaxFlow::MaxFlow(int nodes) {
  if (nodes < 0) throw DomainError("negative node count");
  nodes_.resize(static_cast<std::size_t>(nodes));
}

void MaxFlow::check_node(int i) const {
  if (i < 0 || i >= node_count()) throw DomainError("node index " + std::to_string(i) + " out of range");
}

void MaxFlow::add_terminal(int i, double source_cap, double sink_cap) {
  check_node(i);
  if (!(source_cap >= 0.0) || !(sink_cap >= 0.0)) throw DomainError("terminal capacities must be non-negative");
  // Pushing the common part straight through leaves the cut unchanged.
  const double common = std::min(source_cap, sink_cap);
  offset_ += common;
  nodes_[static_cast<std::size_t>(i)].tr_cap += source_cap - sink_cap;
}

void MaxFlow::add_edge(int i, int j, double cap, double rev_cap) {
  check_node(i);
  check_node(j);
  if (!(cap >= 0.0) || !(rev_cap >= 0.0)) throw DomainError("edge capacities must be non-negative");
  if (i == j) return;
  const int a = static_cast<int>(arcs_.size());
  Node& ni = nodes_[static_cast<std::size_t>(i)];
  Node& nj = nodes_[static_cast<std::size_t>(j)];
  arcs_.push_back({j, ni.first, cap});
  arcs_.push_back({i, nj.first, rev_cap});
  ni.first = a;
  nj.first = a + 1;
}

void MaxFlow::activate(int i) {
  Node& n = nodes_[static_cast<std::size_t>(i)];
  if (!n.active) {
    n.active = true;
    active_.push_back(i);
  }
}

// Extends the tree of i by one layer. Returns the arc that links the source
// tree to the sink tree (oriented source -> sink), or kNone.
int MaxFlow::grow(int i) {
  const Tree tree = nodes_[static_cast<std::size_t>(i)].tree;
  for (int a = nodes_[static_cast<std::size_t>(i)].first; a != kNone; a = arcs_[static_cast<std::size_t>(a)].next) {
    const int j = arcs_[static_cast<std::size_t>(a)].head;
    Node& nj = nodes_[static_cast<std::size_t>(j)];
    // Residual capacity in the direction the tree grows.
    const double cap = tree == Tree::source ? arcs_[static_cast<std::size_t>(a)].cap
                                            : arcs_[static_cast<std::size_t>(sister(a))].cap;
    if (cap <= 0.0) continue;
    if (nj.tree == Tree::none) {
      nj.tree = tree;
      nj.parent = sister(a);  // arc j -> i
      activate(j);
    } else if (nj.tree != tree) {
      return tree == Tree::source ? a : sister(a);
    }
  }
  return kNone;
}

void MaxFlow::augment(int middle) {
  const int s_end = arcs_[static_cast<std::size_t>(sister(middle))].head;
  const int t_end = arcs_[static_cast<std::size_t>(middle)].head;

  double bottleneck = arcs_[static_cast<std::size_t>(middle)].cap;
  int i = s_end;
  for (int a; (a = nodes_[static_cast<std::size_t>(i)].parent) != kTerminal; i = arcs_[static_cast<std::size_t>(a)].head)
    bottleneck = std::min(bottleneck, arcs_[static_cast<std::size_t>(sister(a))].cap);
  bottleneck = std::min(bottleneck, nodes_[static_cast<std::size_t>(i)].tr_cap);
  i = t_end;
  for (int a; (a = nodes_[static_cast<std::size_t>(i)].parent) != kTerminal; i = arcs_[static_cast<std::size_t>(a)].head)
    bottleneck = std::min(bottleneck, arcs_[static_cast<std::size_t>(a)].cap);
  bottleneck = std::min(bottleneck, -nodes_[static_cast<std::size_t>(i)].tr_cap);

  arcs_[static_cast<std::size_t>(middle)].cap -= bottleneck;
  arcs_[static_cast<std::size_t>(sister(middle))].cap += bottleneck;

  auto orphan = [&](int node) {
    nodes_[static_cast<std::size_t>(node)].parent = kOrphan;
    orphans_.push_back(node);
  };
  i = s_end;
  while (true) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    const int a = n.parent;
    if (a == kTerminal) {
      n.tr_cap -= bottleneck;
      if (n.tr_cap <= 0.0) {
        n.tr_cap = 0.0;
        orphan(i);
      }
      break;
    }
    arcs_[static_cast<std::size_t>(a)].cap += bottleneck;
    Arc& down = arcs_[static_cast<std::size_t>(sister(a))];
    down.cap -= bottleneck;
    const int up = arcs_[static_cast<std::size_t>(a)].head;
    if (down.cap <= 0.0) {
      down.cap = 0.0;
      orphan(i);
    }
    i = up;
  }
  i = t_end;
  while (true) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    const int a = n.parent;
    if (a == kTerminal) {
      n.tr_cap += bottleneck;
      if (n.tr_cap >= 0.0) {
        n.tr_cap = 0.0;
        orphan(i);
      }
      break;
    }
    arcs_[static_cast<std::size_t>(sister(a))].cap += bottleneck;
    Arc& up_arc = arcs_[static_cast<std::size_t>(a)];
    up_arc.cap -= bottleneck;
    const int up = up_arc.head;
    if (up_arc.cap <= 0.0) {
      up_arc.cap = 0.0;
      orphan(i);
    }
    i = up;
  }
  flow_ += bottleneck;
}

bool MaxFlow::rooted(int i) const {
  while (true) {
    const int a = nodes_[static_cast<std::size_t>(i)].parent;
    if (a == kTerminal) return true;
    if (a < 0) return false;
    i = arcs_[static_cast<std::size_t>(a)].head;
  }
}

void MaxFlow::adopt() {
  while (!orphans_.empty()) {
    const int i = orphans_.front();
    orphans_.pop_front();
    Node& n = nodes_[static_cast<std::size_t>(i)];
    const Tree tree = n.tree;
    int found = kNone;
    for (int a = n.first; a != kNone; a = arcs_[static_cast<std::size_t>(a)].next) {
      const int j = arcs_[static_cast<std::size_t>(a)].head;
      if (nodes_[static_cast<std::size_t>(j)].tree != tree) continue;
      // Capacity along the tree direction: parent -> child in the source
      // tree, child -> parent in the sink tree.
      const double cap = tree == Tree::source ? arcs_[static_cast<std::size_t>(sister(a))].cap
                                              : arcs_[static_cast<std::size_t>(a)].cap;
      if (cap > 0.0 && rooted(j)) {
        found = a;
        break;
      }
    }
    if (found != kNone) {
      n.parent = found;
      continue;
    }
    n.tree = Tree::none;
    n.parent = kNone;
    for (int a = n.first; a != kNone; a = arcs_[static_cast<std::size_t>(a)].next) {
      const int j = arcs_[static_cast<std::size_t>(a)].head;
      Node& nj = nodes_[static_cast<std::size_t>(j)];
      if (nj.tree != tree) continue;
      const double cap = tree == Tree::source ? arcs_[static_cast<std::size_t>(sister(a))].cap
                                              : arcs_[static_cast<std::size_t>(a)].cap;
      if (cap > 0.0) activate(j);
      if (nj.parent == sister(a)) {
        nj.parent = kOrphan;
        orphans_.push_back(j);
      }
    }
  }
}

double MaxFlow::solve() {
  if (solved_) throw Error("MaxFlow::solve called twice");
  solved_ = true;
  for (int i = 0; i < node_count(); ++i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.tr_cap > 0.0) n.tree = Tree::source;
    else if (n.tr_cap < 0.0) n.tree = Tree::sink;
    else continue;
    n.parent = kTerminal;
    activate(i);
  }
  while (!active_.empty()) {
    const int i = active_.front();
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.tree == Tree::none) {
      active_.pop_front();
      n.active = false;
      continue;
    }
    const int middle = grow(i);
    if (middle == kNone) {
      active_.pop_front();
      n.active = false;
      continue;
    }
    // i stays at the front: it may have further links to the other tree.
    augment(middle);
    adopt();
  }
  return flow_ + offset_;
}

bool MaxFlow::in_sink(int i) const {
  if (!solved_) throw Error("MaxFlow::in_sink before solve");
  return nodes_.at(static_cast<std::size_t>(i)).tree == Tree::sink;
}

}  // namespace apf
