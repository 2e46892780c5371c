#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "igw/fragments.hpp"

namespace igw {

enum class Family { InverseGWishart, Gaussian, MoonRock };

std::string to_string(Family f);

struct Message {
    VectorXd eta;
    std::optional<Graph> graph;  // set for Inverse G-Wishart messages only
};

Message operator+(const Message& a, const Message& b);

struct Node {
    std::string name;
    Family family;
    Index dim;                   // matrix dimension d (IGW), coefficient length k (Gaussian), 1 (Moon Rock)
    std::optional<Graph> graph;  // IGW nodes only

    Index natural_length() const;
};

// A factor's update rule. `to_factor` and `to_node` hold the current messages
// on each incident edge in the factor's node order; the result replaces `to_node`.
class Fragment {
public:
    virtual ~Fragment() = default;
    virtual std::vector<Message> update(const std::vector<Message>& to_factor, const std::vector<Message>& to_node,
                                        Properness mode) const = 0;
    virtual Index arity() const = 0;
};

struct Factor {
    std::string name;
    std::vector<Index> nodes;
    std::shared_ptr<const Fragment> fragment;
};

struct RunOptions {
    double tol = 1e-10;
    int max_iters = 500;
    Properness mode = Properness::Strict;
};

struct ConvergenceReport {
    bool converged = false;
    int iterations = 0;
    double final_change = 0.0;
    std::vector<double> history;

    // One line per sweep: "<iteration> <max relative change>".
    std::string log() const;
    // Throws NotConverged unless the run met its tolerance.
    void require_converged() const;
};

class FactorGraph {
public:
    Index add_node(const std::string& name, Family family, Index dim, std::optional<Graph> graph = std::nullopt);
    Index add_factor(const std::string& name, const std::vector<Index>& nodes, std::shared_ptr<const Fragment> fragment);

    Index num_nodes() const { return static_cast<Index>(nodes_.size()); }
    Index num_factors() const { return static_cast<Index>(factors_.size()); }
    const Node& node(Index i) const { return nodes_.at(i); }
    const Factor& factor(Index i) const { return factors_.at(i); }
    Index node_index(const std::string& name) const;
    Index factor_index(const std::string& name) const;
    const std::vector<Index>& factors_of(Index node) const { return node_factors_.at(node); }

    // Checks length and graph tag against the node before storing.
    void set_f2n(Index factor, Index node, const Message& m);
    const Message& f2n(Index factor, Index node) const;
    bool has_f2n(Index factor, Index node) const;

    // Sum of the messages from every other factor on the node.
    Message node_to_factor(Index node, Index factor) const;
    const Message& n2f(Index node, Index factor) const;
    Message combined(Index factor, Index node) const;
    Message q_star(Index node) const;

    // Recomputes the incident node-to-factor messages and applies the factor's fragment.
    void update_factor(Index factor, Properness mode);
    void sweep(const std::vector<Index>& schedule, Properness mode);

    ConvergenceReport run(const std::vector<Index>& schedule, const RunOptions& opt);
    ConvergenceReport run(const RunOptions& opt) { return run(default_schedule(), opt); }
    std::vector<Index> default_schedule() const;

    // All factor-to-node messages stacked in edge order.
    VectorXd f2n_snapshot() const;

private:
    Index slot(Index factor, Index node) const;
    Message zero_message(Index node) const;

    std::vector<Node> nodes_;
    std::vector<Factor> factors_;
    std::vector<std::vector<Index>> node_factors_;
    std::vector<std::vector<std::optional<Message>>> f2n_;
    std::vector<std::vector<std::optional<Message>>> n2f_;
};

// Maximum over entries of |new - old| / (|new| + 1e-10).
double max_relative_change(const VectorXd& old_eta, const VectorXd& new_eta);

Message to_message(const NaturalIGW& n);
Message to_message(const NaturalMVN& n);
Message moonrock_message(const Eigen::Vector2d& eta);
NaturalIGW as_igw(const Message& m);
NaturalMVN as_mvn(const Message& m);

// Standard fragment bindings.

// Node order: {Theta}.
class IGWPriorFragment : public Fragment {
public:
    explicit IGWPriorFragment(IGWPriorInputs in);
    std::vector<Message> update(const std::vector<Message>&, const std::vector<Message>&, Properness) const override;
    Index arity() const override { return 1; }
    const IGWPriorInputs& inputs() const { return in_; }

private:
    IGWPriorInputs in_;
};

// Node order: {Sigma, A}.
class IteratedIGWFragment : public Fragment {
public:
    IteratedIGWFragment(double xi, Graph G);
    std::vector<Message> update(const std::vector<Message>& to_factor, const std::vector<Message>& to_node,
                                Properness mode) const override;
    Index arity() const override { return 2; }
    double xi() const { return xi_; }

private:
    double xi_;
    Graph G_;
};

// Node order: {upsilon}.
class MoonRockPriorFragment : public Fragment {
public:
    explicit MoonRockPriorFragment(MoonRockPriorInputs in) : in_(in) {}
    std::vector<Message> update(const std::vector<Message>&, const std::vector<Message>&, Properness) const override;
    Index arity() const override { return 1; }

private:
    MoonRockPriorInputs in_;
};

// Node order: {(beta, u), Sigma}.
class GaussianPenalizationFragment : public Fragment {
public:
    GaussianPenalizationFragment(double sigma_beta, PenalizationDims dims) : sigma_beta_(sigma_beta), dims_(dims) {}
    std::vector<Message> update(const std::vector<Message>& to_factor, const std::vector<Message>& to_node,
                                Properness mode) const override;
    Index arity() const override { return 2; }

private:
    double sigma_beta_;
    PenalizationDims dims_;
};

// Node order: {(beta, u), sigma^2, upsilon}.
class TLikelihoodFragment : public Fragment {
public:
    TLikelihoodFragment(VectorXd y, MatrixXd C) : y_(std::move(y)), C_(std::move(C)) {}
    std::vector<Message> update(const std::vector<Message>& to_factor, const std::vector<Message>& to_node,
                                Properness mode) const override;
    Index arity() const override { return 3; }

private:
    VectorXd y_;
    MatrixXd C_;
};

}  // namespace igw
