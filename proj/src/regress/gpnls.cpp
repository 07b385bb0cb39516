#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "xsr/expr/eval.hpp"
#include "xsr/metrics/accuracy.hpp"
#include "xsr/regress/gpnls.hpp"
#include "xsr/regress/lm.hpp"
#include "xsr/regress/trainers.hpp"

namespace xsr::regress {

using expr::BinaryOp;
using expr::ExprTree;
using expr::Node;
using expr::NodePtr;
using expr::UnaryOp;

namespace {

constexpr double kWorstFitness = std::numeric_limits<double>::infinity();

NodePtr random_terminal(Rng& rng, int dimension) {
    // Half variables, half ephemeral constants.
    if (rng.uniform01() < 0.5) {
        return Node::variable(rng.index(dimension));
    }
    return Node::constant(rng.uniform(-2.0, 2.0));
}

}  // namespace

ExprTree ptc2(Rng& rng, const expr::FunctionSet& functions, int dimension, int max_depth,
              int max_size) {
    const int total_ops = static_cast<int>(functions.unary.size() + functions.binary.size());
    const int target_size = 1 + rng.index(max_size);
    if (target_size == 1 || max_depth <= 1 || total_ops == 0) {
        return ExprTree(random_terminal(rng, dimension));
    }

    // Build with an explicit mutable scaffold: nodes are assembled bottom-up
    // once all slots are decided.
    struct Scaffold {
        bool is_function = false;
        bool is_unary = false;
        UnaryOp uop = UnaryOp::Id;
        BinaryOp bop = BinaryOp::Add;
        NodePtr terminal;
        int left = -1, right = -1;
        int depth = 1;
    };
    std::vector<Scaffold> nodes;

    auto make_function_node = [&](int depth) {
        Scaffold s;
        s.is_function = true;
        s.depth = depth;
        const int pick = rng.index(total_ops);
        if (pick < static_cast<int>(functions.unary.size())) {
            s.is_unary = true;
            s.uop = functions.unary[static_cast<std::size_t>(pick)];
        } else {
            s.bop = functions.binary[static_cast<std::size_t>(pick - static_cast<int>(functions.unary.size()))];
        }
        nodes.push_back(s);
        return static_cast<int>(nodes.size()) - 1;
    };

    auto make_terminal_node = [&](int depth) {
        Scaffold s;
        s.depth = depth;
        s.terminal = random_terminal(rng, dimension);
        nodes.push_back(s);
        return static_cast<int>(nodes.size()) - 1;
    };

    const int root = make_function_node(1);
    int size = 1;
    std::vector<std::pair<int, int>> slots;  // (parent index, child ordinal 0/1)
    slots.emplace_back(root, 0);
    if (!nodes[static_cast<std::size_t>(root)].is_unary) slots.emplace_back(root, 1);
    size += static_cast<int>(slots.size());

    // Classic PTC2: expand random open slots into functions while the budget
    // allows, then fill the remainder with terminals.
    while (!slots.empty()) {
        const int pick = rng.index(static_cast<int>(slots.size()));
        const auto [parent, ordinal] = slots[static_cast<std::size_t>(pick)];
        slots.erase(slots.begin() + pick);
        const int depth = nodes[static_cast<std::size_t>(parent)].depth + 1;

        const bool must_terminal = depth >= max_depth || size >= target_size;
        int child;
        if (must_terminal) {
            child = make_terminal_node(depth);
        } else {
            child = make_function_node(depth);
            const int arity = nodes[static_cast<std::size_t>(child)].is_unary ? 1 : 2;
            if (size + arity > target_size) {
                // The drawn function would overshoot the budget: demote it.
                nodes.pop_back();
                child = make_terminal_node(depth);
            } else {
                for (int a = 0; a < arity; ++a) slots.emplace_back(child, a);
                size += arity;
            }
        }
        if (ordinal == 0) {
            nodes[static_cast<std::size_t>(parent)].left = child;
        } else {
            nodes[static_cast<std::size_t>(parent)].right = child;
        }
    }

    // Assemble immutable nodes bottom-up (children have larger indices).
    std::vector<NodePtr> built(nodes.size());
    for (std::size_t i = nodes.size(); i-- > 0;) {
        const Scaffold& s = nodes[i];
        if (!s.is_function) {
            built[i] = s.terminal;
        } else if (s.is_unary) {
            built[i] = Node::unary(s.uop, built[static_cast<std::size_t>(s.left)]);
        } else {
            built[i] = Node::binary(s.bop, built[static_cast<std::size_t>(s.left)],
                                    built[static_cast<std::size_t>(s.right)]);
        }
    }
    return ExprTree(built[0]);
}

namespace {

NodePtr expand_node(const NodePtr& node, int& next_parameter, std::vector<double>& theta0) {
    switch (node->kind()) {
        case Node::Kind::Constant: {
            theta0.push_back(node->value());
            return Node::parameter(next_parameter++);
        }
        case Node::Kind::Variable: {
            theta0.push_back(1.0);
            return Node::binary(BinaryOp::Mul, Node::parameter(next_parameter++), node);
        }
        case Node::Kind::Unary:
            return Node::unary(node->unary_op(), expand_node(node->child(), next_parameter, theta0));
        case Node::Kind::Binary: {
            NodePtr left = expand_node(node->left(), next_parameter, theta0);
            NodePtr right = expand_node(node->right(), next_parameter, theta0);
            return Node::binary(node->binary_op(), std::move(left), std::move(right));
        }
        case Node::Kind::Parameter:
            throw ContractError("tree already carries parameters");
    }
    throw Error("unknown node kind");
}

}  // namespace

NlsExpansion expand_for_nls(const ExprTree& tree) {
    NlsExpansion expansion;
    std::vector<double> theta0;
    int next_parameter = 0;
    NodePtr body = expand_node(tree.root(), next_parameter, theta0);

    expansion.scale_index = next_parameter++;
    theta0.push_back(1.0);
    expansion.offset_index = next_parameter++;
    theta0.push_back(0.0);

    NodePtr expanded = Node::binary(
        BinaryOp::Add,
        Node::binary(BinaryOp::Mul, Node::parameter(expansion.scale_index), std::move(body)),
        Node::parameter(expansion.offset_index));
    expansion.tree = ExprTree(std::move(expanded));
    expansion.theta0 = Eigen::Map<const Eigen::VectorXd>(theta0.data(), static_cast<Eigen::Index>(theta0.size()));
    return expansion;
}

namespace {

struct GpIndividual {
    ExprTree tree;
    double fitness = kWorstFitness;
};

std::vector<NodePtr> all_nodes(const NodePtr& root) {
    std::vector<NodePtr> list;
    std::vector<NodePtr> stack{root};
    while (!stack.empty()) {
        NodePtr node = stack.back();
        stack.pop_back();
        list.push_back(node);
        if (node->kind() == Node::Kind::Unary) {
            stack.push_back(node->child());
        } else if (node->kind() == Node::Kind::Binary) {
            stack.push_back(node->left());
            stack.push_back(node->right());
        }
    }
    return list;
}

// Replaces the single occurrence identified by pointer identity along a
// depth-first walk; returns nullptr when `target` is not found.
NodePtr replace_node(const NodePtr& root, const NodePtr& target, const NodePtr& replacement) {
    if (root == target) return replacement;
    switch (root->kind()) {
        case Node::Kind::Unary: {
            NodePtr child = replace_node(root->child(), target, replacement);
            return child ? Node::unary(root->unary_op(), std::move(child)) : nullptr;
        }
        case Node::Kind::Binary: {
            NodePtr left = replace_node(root->left(), target, replacement);
            if (left) return Node::binary(root->binary_op(), std::move(left), root->right());
            NodePtr right = replace_node(root->right(), target, replacement);
            if (right) return Node::binary(root->binary_op(), root->left(), std::move(right));
            return nullptr;
        }
        default:
            return nullptr;
    }
}

ExprTree subtree_crossover(const ExprTree& a, const ExprTree& b, Rng& rng, int max_depth,
                           int max_size) {
    const std::vector<NodePtr> donors = all_nodes(b.root());
    const std::vector<NodePtr> targets = all_nodes(a.root());
    for (int attempt = 0; attempt < 8; ++attempt) {
        const NodePtr& target = targets[static_cast<std::size_t>(rng.index(static_cast<int>(targets.size())))];
        const NodePtr& donor = donors[static_cast<std::size_t>(rng.index(static_cast<int>(donors.size())))];
        NodePtr combined = replace_node(a.root(), target, donor);
        if (!combined) continue;
        ExprTree child(std::move(combined));
        if (child.depth() <= max_depth && child.size() <= max_size) return child;
    }
    return a;
}

NodePtr random_node_same_arity(const NodePtr& node, Rng& rng, const expr::FunctionSet& functions,
                               int dimension) {
    switch (node->kind()) {
        case Node::Kind::Constant:
            return Node::constant(node->value() + rng.normal());
        case Node::Kind::Variable:
            return Node::variable(rng.index(dimension));
        case Node::Kind::Unary:
            return Node::unary(functions.unary[static_cast<std::size_t>(rng.index(
                                   static_cast<int>(functions.unary.size())))],
                               node->child());
        case Node::Kind::Binary:
            return Node::binary(functions.binary[static_cast<std::size_t>(rng.index(
                                    static_cast<int>(functions.binary.size())))],
                                node->left(), node->right());
        default:
            return node;
    }
}

ExprTree mutate_tree(const ExprTree& tree, Rng& rng, const expr::FunctionSet& functions,
                     int dimension, int max_depth, int max_size) {
    const std::vector<NodePtr> targets = all_nodes(tree.root());
    const NodePtr& target = targets[static_cast<std::size_t>(rng.index(static_cast<int>(targets.size())))];
    NodePtr replacement;
    if (rng.uniform01() < 0.5) {
        // Point mutation: swap the operator (or jitter the terminal).
        replacement = random_node_same_arity(target, rng, functions, dimension);
    } else {
        // Subtree mutation with a small fresh fragment.
        replacement = ptc2(rng, functions, dimension, 4, 8).root();
    }
    NodePtr changed = replace_node(tree.root(), target, replacement);
    if (!changed) return tree;
    ExprTree child(std::move(changed));
    if (child.depth() > max_depth || child.size() > max_size) return tree;
    return child;
}

}  // namespace

FittedModel fit_gpnls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const GpnlsOptions& options, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const int d = static_cast<int>(X.cols());
    const expr::FunctionSet functions = expr::FunctionSet::gp_default();
    const double y_mean = y.mean();
    const double y_variance = (y.array() - y_mean).square().sum() / static_cast<double>(y.size());

    LmOptions lm_options;
    lm_options.max_iterations = options.lm_iterations;

    struct Evaluated {
        double fitness;
        Eigen::VectorXd theta;
    };

    // Fitness: expand, fit parameters with LM, score NMSE. The expansion is
    // local to the evaluation; the population keeps the original tree.
    auto evaluate = [&](const ExprTree& tree) -> Evaluated {
        const NlsExpansion expansion = expand_for_nls(tree);
        const LmResult lm = levenberg_marquardt(expansion.tree, X, y, expansion.theta0, lm_options);
        const Eigen::VectorXd& theta = lm.success ? lm.theta : expansion.theta0;
        const double norm = lm.success ? lm.final_residual_norm
                                       : std::numeric_limits<double>::infinity();
        if (!std::isfinite(norm)) return {kWorstFitness, theta};
        const double mse = norm * norm / static_cast<double>(y.size());
        return {y_variance > 0 ? mse / y_variance : mse, theta};
    };

    Rng rng(mix_seed(seed));
    std::vector<GpIndividual> population(static_cast<std::size_t>(options.population_size));
    for (auto& individual : population) {
        individual.tree = ptc2(rng, functions, d, options.max_depth, options.max_size);
        individual.fitness = evaluate(individual.tree).fitness;
    }

    auto tournament = [&]() -> const GpIndividual& {
        int best = rng.index(options.population_size);
        for (int i = 1; i < options.tournament_size; ++i) {
            const int contender = rng.index(options.population_size);
            if (population[static_cast<std::size_t>(contender)].fitness <
                population[static_cast<std::size_t>(best)].fitness) {
                best = contender;
            }
        }
        return population[static_cast<std::size_t>(best)];
    };

    auto best_of = [](const std::vector<GpIndividual>& pop) {
        return std::min_element(pop.begin(), pop.end(), [](const auto& a, const auto& b) {
            return a.fitness < b.fitness;
        });
    };

    for (int generation = 0; generation < options.generations; ++generation) {
        std::vector<GpIndividual> next;
        next.reserve(population.size());
        next.push_back(*best_of(population));  // elitism of 1
        while (static_cast<int>(next.size()) < options.population_size) {
            GpIndividual child;
            child.tree = subtree_crossover(tournament().tree, tournament().tree, rng,
                                           options.max_depth, options.max_size);
            if (rng.uniform01() < options.mutation_probability) {
                child.tree = mutate_tree(child.tree, rng, functions, d, options.max_depth,
                                         options.max_size);
            }
            child.fitness = evaluate(child.tree).fitness;
            next.push_back(std::move(child));
        }
        population = std::move(next);
    }

    const auto best = best_of(population);
    ModelInfo info;
    info.hyper_params = {{"population_size", options.population_size},
                         {"generations", options.generations},
                         {"max_depth", options.max_depth},
                         {"max_size", options.max_size},
                         {"tournament_size", options.tournament_size},
                         {"lm_iterations", options.lm_iterations}};
    info.seed = seed;

    // Refit the winner and bake its parameters into the returned tree.
    const NlsExpansion expansion = expand_for_nls(best->tree);
    const LmResult lm = levenberg_marquardt(expansion.tree, X, y, expansion.theta0, lm_options);
    const Eigen::VectorXd& theta = lm.success ? lm.theta : expansion.theta0;
    const std::span<const double> theta_span(theta.data(), static_cast<std::size_t>(theta.size()));
    const ExprTree final_tree = expr::substitute_parameters(expansion.tree, theta_span);

    if (!std::isfinite(best->fitness)) {
        info.flagged = true;
        info.flag_reason = "no finite-fitness individual; returning the last best tree unfitted";
    }
    info.hyper_params["train_nmse"] = best->fitness;
    info.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return make_symbolic_model("gpnls", final_tree, d, std::move(info));
}

}  // namespace xsr::regress
