#pragma once

#include <string>
#include <vector>

#include "gdsl/geometry.hpp"
#include "gdsl/model.hpp"

namespace gdsl {

// Flattened render tree. Groups carry a matrix and children; leaves carry a
// fully resolved primitive and the matrix placing it in the parent group.
struct SceneNode {
  enum class Kind { group, leaf };

  Kind kind = Kind::group;
  std::string name;  // id of the container this node was expanded from
  AffineMatrix matrix;
  std::vector<SceneNode> children;  // groups only
  Primitive primitive;              // leaves only
  bool text_middle = false;         // text placed by a center relation

  bool is_group() const { return kind == Kind::group; }
  bool is_leaf() const { return kind == Kind::leaf; }

  static SceneNode group(std::string name, AffineMatrix m = {}) {
    SceneNode n;
    n.kind = Kind::group;
    n.name = std::move(name);
    n.matrix = m;
    return n;
  }
  static SceneNode leaf(std::string name, Primitive p, AffineMatrix m = {}) {
    SceneNode n;
    n.kind = Kind::leaf;
    n.name = std::move(name);
    n.primitive = std::move(p);
    n.matrix = m;
    return n;
  }
};

std::size_t count_groups(const SceneNode& n);
std::size_t count_leaves(const SceneNode& n);

// Leaves with their accumulated world matrices, in document order.
struct WorldLeaf {
  const SceneNode* node;
  AffineMatrix world;
};
std::vector<WorldLeaf> world_leaves(const SceneNode& root,
                                    const AffineMatrix& outer = AffineMatrix::identity());

}  // namespace gdsl
