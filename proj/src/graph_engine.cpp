#include "igw/graph_engine.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace igw {

std::string to_string(Family f)
{
    switch (f) {
    case Family::InverseGWishart: return "inverse-g-wishart";
    case Family::Gaussian: return "gaussian";
    case Family::MoonRock: return "moon-rock";
    }
    return "unknown";
}

Message operator+(const Message& a, const Message& b)
{
    if (a.eta.size() != b.eta.size()) throw DimensionMismatch("cannot add messages of different lengths");
    if (a.graph && b.graph && *a.graph != *b.graph) throw DimensionMismatch("cannot add messages with different graphs");
    return {a.eta + b.eta, a.graph ? a.graph : b.graph};
}

Index Node::natural_length() const
{
    switch (family) {
    case Family::InverseGWishart: return 1 + vech_length(dim);
    case Family::Gaussian: return dim + vech_length(dim);
    case Family::MoonRock: return 2;
    }
    return 0;
}

std::string ConvergenceReport::log() const
{
    std::ostringstream os;
    char buf[64];
    for (std::size_t i = 0; i < history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu %.5e\n", i + 1, history[i]);
        os << buf;
    }
    return os.str();
}

void ConvergenceReport::require_converged() const
{
    if (converged) return;
    char buf[128];
    std::snprintf(buf, sizeof buf, "not converged after %d sweeps (last relative change %.3e)", iterations,
                  final_change);
    throw NotConverged(buf);
}

Index FactorGraph::add_node(const std::string& name, Family family, Index dim, std::optional<Graph> graph)
{
    if (dim < 1) throw DimensionMismatch("node '" + name + "' must have positive dimension");
    if ((family == Family::InverseGWishart) != graph.has_value())
        throw InvalidShape("node '" + name + "': a graph tag is required for, and only for, Inverse G-Wishart nodes");
    for (const auto& n : nodes_)
        if (n.name == name) throw InvalidShape("duplicate node name '" + name + "'");
    nodes_.push_back({name, family, dim, graph});
    node_factors_.emplace_back();
    return num_nodes() - 1;
}

Index FactorGraph::add_factor(const std::string& name, const std::vector<Index>& nodes,
                              std::shared_ptr<const Fragment> fragment)
{
    if (!fragment) throw InvalidShape("factor '" + name + "' has no fragment");
    if (fragment->arity() != static_cast<Index>(nodes.size()))
        throw DimensionMismatch("factor '" + name + "': fragment expects " + std::to_string(fragment->arity()) +
                                " nodes, got " + std::to_string(nodes.size()));
    for (Index n : nodes)
        if (n < 0 || n >= num_nodes()) throw DimensionMismatch("factor '" + name + "' references a missing node");
    for (const auto& f : factors_)
        if (f.name == name) throw InvalidShape("duplicate factor name '" + name + "'");
    factors_.push_back({name, nodes, std::move(fragment)});
    const Index fi = num_factors() - 1;
    for (Index n : nodes) node_factors_[n].push_back(fi);
    f2n_.emplace_back(nodes.size());
    n2f_.emplace_back(nodes.size());
    return fi;
}

Index FactorGraph::node_index(const std::string& name) const
{
    for (Index i = 0; i < num_nodes(); ++i)
        if (nodes_[i].name == name) return i;
    throw DimensionMismatch("no node named '" + name + "'");
}

Index FactorGraph::factor_index(const std::string& name) const
{
    for (Index i = 0; i < num_factors(); ++i)
        if (factors_[i].name == name) return i;
    throw DimensionMismatch("no factor named '" + name + "'");
}

Index FactorGraph::slot(Index factor, Index node) const
{
    const auto& ns = factors_.at(factor).nodes;
    for (std::size_t k = 0; k < ns.size(); ++k)
        if (ns[k] == node) return static_cast<Index>(k);
    throw DimensionMismatch("no edge between factor '" + factors_.at(factor).name + "' and node '" +
                            nodes_.at(node).name + "'");
}

void FactorGraph::set_f2n(Index factor, Index node, const Message& m)
{
    const Node& nd = nodes_.at(node);
    const Index k = slot(factor, node);
    if (m.eta.size() != nd.natural_length())
        throw DimensionMismatch("message to '" + nd.name + "' has length " + std::to_string(m.eta.size()) +
                                ", expected " + std::to_string(nd.natural_length()));
    if (m.graph != nd.graph)
        throw DimensionMismatch("message from '" + factors_[factor].name + "' to '" + nd.name +
                                "' violates the node's graph constraint");
    if (!m.eta.allFinite())
        throw NumericalFailure("non-finite message from '" + factors_[factor].name + "' to '" + nd.name + "'");
    f2n_[factor][k] = m;
}

bool FactorGraph::has_f2n(Index factor, Index node) const { return f2n_.at(factor)[slot(factor, node)].has_value(); }

const Message& FactorGraph::f2n(Index factor, Index node) const
{
    const auto& m = f2n_.at(factor)[slot(factor, node)];
    if (!m)
        throw MissingMessage("message from '" + factors_[factor].name + "' to '" + nodes_[node].name +
                             "' is uninitialized");
    return *m;
}

Message FactorGraph::zero_message(Index node) const
{
    const Node& nd = nodes_.at(node);
    return {VectorXd::Zero(nd.natural_length()), nd.graph};
}

Message FactorGraph::node_to_factor(Index node, Index factor) const
{
    slot(factor, node);
    Message out = zero_message(node);
    for (Index f : node_factors_.at(node))
        if (f != factor) out.eta += f2n(f, node).eta;
    return out;
}

const Message& FactorGraph::n2f(Index node, Index factor) const
{
    const auto& m = n2f_.at(factor)[slot(factor, node)];
    if (!m)
        throw MissingMessage("message from '" + nodes_[node].name + "' to '" + factors_[factor].name +
                             "' has not been computed");
    return *m;
}

Message FactorGraph::combined(Index factor, Index node) const { return f2n(factor, node) + n2f(node, factor); }

Message FactorGraph::q_star(Index node) const
{
    Message out = zero_message(node);
    if (node_factors_.at(node).empty()) throw MissingMessage("node '" + nodes_[node].name + "' has no factors");
    for (Index f : node_factors_[node]) out.eta += f2n(f, node).eta;
    return out;
}

void FactorGraph::update_factor(Index factor, Properness mode)
{
    const Factor& fac = factors_.at(factor);
    std::vector<Message> to_factor, to_node;
    for (std::size_t k = 0; k < fac.nodes.size(); ++k) {
        n2f_[factor][k] = node_to_factor(fac.nodes[k], factor);
        to_factor.push_back(*n2f_[factor][k]);
        to_node.push_back(f2n(factor, fac.nodes[k]));
    }
    const std::vector<Message> out = fac.fragment->update(to_factor, to_node, mode);
    if (out.size() != fac.nodes.size())
        throw DimensionMismatch("fragment of '" + fac.name + "' returned the wrong number of messages");
    for (std::size_t k = 0; k < out.size(); ++k) set_f2n(factor, fac.nodes[k], out[k]);
}

void FactorGraph::sweep(const std::vector<Index>& schedule, Properness mode)
{
    for (Index f : schedule) update_factor(f, mode);
}

std::vector<Index> FactorGraph::default_schedule() const
{
    std::vector<Index> s(factors_.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<Index>(i);
    return s;
}

VectorXd FactorGraph::f2n_snapshot() const
{
    Index n = 0;
    for (Index f = 0; f < num_factors(); ++f)
        for (Index node : factors_[f].nodes) n += nodes_[node].natural_length();
    VectorXd out(n);
    Index o = 0;
    for (Index f = 0; f < num_factors(); ++f)
        for (Index node : factors_[f].nodes) {
            const VectorXd& e = f2n(f, node).eta;
            out.segment(o, e.size()) = e;
            o += e.size();
        }
    return out;
}

double max_relative_change(const VectorXd& old_eta, const VectorXd& new_eta)
{
    if (old_eta.size() != new_eta.size()) throw DimensionMismatch("max_relative_change: length mismatch");
    double m = 0.0;
    for (Index i = 0; i < old_eta.size(); ++i)
        m = std::max(m, std::abs(new_eta(i) - old_eta(i)) / (std::abs(new_eta(i)) + 1e-10));
    return m;
}

ConvergenceReport FactorGraph::run(const std::vector<Index>& schedule, const RunOptions& opt)
{
    for (Index f : schedule)
        if (f < 0 || f >= num_factors()) throw DimensionMismatch("schedule references a missing factor");
    ConvergenceReport rep;
    VectorXd prev = f2n_snapshot();
    for (int it = 0; it < opt.max_iters; ++it) {
        sweep(schedule, opt.mode);
        VectorXd cur = f2n_snapshot();
        const double change = max_relative_change(prev, cur);
        rep.history.push_back(change);
        rep.iterations = it + 1;
        rep.final_change = change;
        prev = std::move(cur);
        if (change < opt.tol) {
            rep.converged = true;
            break;
        }
    }
    return rep;
}

Message to_message(const NaturalIGW& n) { return {n.stacked(), n.graph}; }
Message to_message(const NaturalMVN& n) { return {n.stacked(), std::nullopt}; }
Message moonrock_message(const Eigen::Vector2d& eta) { return {VectorXd(eta), std::nullopt}; }

NaturalIGW as_igw(const Message& m)
{
    if (!m.graph) throw DimensionMismatch("message has no graph tag; not an Inverse G-Wishart message");
    return NaturalIGW::from_stacked(*m.graph, m.eta);
}

NaturalMVN as_mvn(const Message& m) { return NaturalMVN::from_stacked(m.eta); }

IGWPriorFragment::IGWPriorFragment(IGWPriorInputs in) : in_(std::move(in))
{
    make_common_igw(in_.graph_Theta, in_.xi_Theta, in_.Lambda_Theta);
}

std::vector<Message> IGWPriorFragment::update(const std::vector<Message>&, const std::vector<Message>&,
                                              Properness) const
{
    return {to_message(igw_prior_update(in_).eta)};
}

IteratedIGWFragment::IteratedIGWFragment(double xi, Graph G) : xi_(xi), G_(G)
{
    if (!(xi > 0.0)) throw InvalidShape("iterated fragment shape must be positive");
}

std::vector<Message> IteratedIGWFragment::update(const std::vector<Message>& to_factor,
                                                 const std::vector<Message>& to_node, Properness mode) const
{
    IteratedIGWState st;
    st.G = G_;
    st.xi = xi_;
    st.eta_Sigma_to_f = as_igw(to_factor[0]);
    st.eta_f_to_Sigma = as_igw(to_node[0]);
    st.eta_A_to_f = as_igw(to_factor[1]);
    st.eta_f_to_A = as_igw(to_node[1]);
    st.G_A_to_f = st.eta_A_to_f.graph;
    const IteratedIGWOutput out = iterated_igw_update(st, mode);
    return {to_message(out.eta_f_to_Sigma), to_message(out.eta_f_to_A)};
}

std::vector<Message> MoonRockPriorFragment::update(const std::vector<Message>&, const std::vector<Message>&,
                                                   Properness) const
{
    return {moonrock_message(moonrock_prior_update(in_))};
}

std::vector<Message> GaussianPenalizationFragment::update(const std::vector<Message>& to_factor,
                                                          const std::vector<Message>& to_node, Properness mode) const
{
    const auto out = gaussian_penalization_update(as_mvn(to_factor[0]), as_mvn(to_node[0]), as_igw(to_factor[1]),
                                                  as_igw(to_node[1]), sigma_beta_, dims_, mode);
    return {to_message(out.eta_f_to_thetau), to_message(out.eta_f_to_Sigma)};
}

std::vector<Message> TLikelihoodFragment::update(const std::vector<Message>& to_factor,
                                                 const std::vector<Message>& to_node, Properness mode) const
{
    const auto out = t_likelihood_update(y_, C_, as_mvn(to_factor[0]), as_mvn(to_node[0]), as_igw(to_factor[1]),
                                         as_igw(to_node[1]), to_factor[2].eta, to_node[2].eta, mode);
    return {to_message(out.eta_f_to_thetau), to_message(out.eta_f_to_sigma2),
            moonrock_message(out.eta_f_to_upsilon)};
}

}  // namespace igw
