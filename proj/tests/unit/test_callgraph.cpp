#include <gtest/gtest.h>

#include "patmine/callgraph.hpp"
#include "patmine/errors.hpp"
#include "patmine/java_parser.hpp"
#include "test_support.hpp"

using namespace patmine;
using patmine::testing::manifest_of;
using patmine::testing::source;

namespace {

CallGraph graph_of(std::vector<SourceFile> files) { return build_call_graph(parse_corpus(manifest_of(std::move(files)))); }

bool has_edge(const CallGraph& g, const MethodId& from, const MethodId& to, EdgeStatus status) {
    for (const auto& e : g.edges()) {
        if (e.caller == from && e.callee == to && e.status == status) return true;
    }
    return false;
}

}  // namespace

TEST(CallGraph, SameClassCallResolves) {
    const auto g = graph_of({source("A.java", "class A { void m() { this.n(); } void n() {} }")});
    EXPECT_TRUE(has_edge(g, {"A", "m", 0}, {"A", "n", 0}, EdgeStatus::Resolved));
}

TEST(CallGraph, TypedReceiverResolvesAcrossFiles) {
    const auto g = graph_of({source("A.java", "class A { void m(B b) { b.run(); } }"),
                             source("B.java", "class B { void run() {} }")});
    EXPECT_TRUE(has_edge(g, {"A", "m", 1}, {"B", "run", 0}, EdgeStatus::Resolved));
    EXPECT_EQ(g.callers({"B", "run", 0}), (std::vector<MethodId>{{"A", "m", 1}}));
}

TEST(CallGraph, PrintlnIsExternalWithUnknownClass) {
    const auto g = graph_of({source("A.java", "class A { void m() { System.out.println(\"x\"); } }")});
    EXPECT_TRUE(has_edge(g, {"A", "m", 0}, {"?", "println", 1}, EdgeStatus::External));
    EXPECT_EQ(g.nodes().size(), 1u);
}

TEST(CallGraph, CalleesCountsDistinctTargets) {
    const auto g = graph_of({source("A.java",
                                    "class A { void m(B b, C c, D d) { b.x(); c.y(); d.z(); b.x(); } }\n"
                                    "class B { void x() {} }\nclass C { void y() {} }\nclass D { void z() {} }\n")});
    EXPECT_EQ(g.callees({"A", "m", 3}).size(), 3u);
}

TEST(CallGraph, ExternalOnlyDropsSameClassCallees) {
    const auto g = graph_of({source("A.java", "class A { B b; void m() { b.n(); p(); } void p() {} }"),
                             source("B.java", "class B { void n() {} }")});
    EXPECT_EQ(g.callees({"A", "m", 0}).size(), 2u);
    EXPECT_EQ(g.callees({"A", "m", 0}, true), (std::vector<MethodId>{{"B", "n", 0}}));
    EXPECT_TRUE(g.callees({"A", "p", 0}).empty());
}

TEST(CallGraph, RecursionAndUncalledMethods) {
    const auto g = graph_of({source("A.java", "class A { int f(int n) { return n == 0 ? 0 : f(n - 1); } void idle() {} }")});
    EXPECT_EQ(g.callers({"A", "f", 1}), (std::vector<MethodId>{{"A", "f", 1}}));
    EXPECT_TRUE(g.callers({"A", "idle", 0}).empty());
}

TEST(CallGraph, UnknownMethodThrows) {
    const auto g = graph_of({source("A.java", "class A { void m() {} }")});
    EXPECT_THROW(g.callees({"A", "zz", 0}), UnknownMethodError);
    EXPECT_THROW(g.callers({"Nope", "m", 0}), UnknownMethodError);
}

TEST(CallGraph, InheritedMethodResolvesToNearestAncestor) {
    const auto g = graph_of({source("Base.java", "class Base { void hook() {} }"),
                             source("Mid.java", "class Mid extends Base { }"),
                             source("Leaf.java", "class Leaf extends Mid { void go(Leaf other) { hook(); other.hook(); } }")});
    EXPECT_TRUE(has_edge(g, {"Leaf", "go", 1}, {"Base", "hook", 0}, EdgeStatus::Resolved));
    EXPECT_EQ(g.callees({"Leaf", "go", 1}).size(), 1u);
}

TEST(CallGraph, ImplicitCallIntoExternalSuperclass) {
    const auto g = graph_of({source("V.java", "class V extends javax.swing.JPanel { void draw() { repaint(); } }")});
    EXPECT_TRUE(has_edge(g, {"V", "draw", 0}, {"javax.swing.JPanel", "repaint", 0}, EdgeStatus::External));
    EXPECT_EQ(g.callees({"V", "draw", 0}, true).size(), 1u);
}

TEST(CallGraph, ArityDistinguishesOverloadsAndUnknownReceiverNeedsUniqueOwner) {
    const auto g = graph_of({source("A.java",
                                    "class A { void m() { get().solo(1); get().twin(); } A get() { return this; }\n"
                                    " void solo(int x) {} }\n"
                                    "class B { void twin() {} }\nclass C { void twin() {} }\n")});
    EXPECT_TRUE(has_edge(g, {"A", "m", 0}, {"A", "solo", 1}, EdgeStatus::Resolved));
    EXPECT_TRUE(has_edge(g, {"A", "m", 0}, {"?", "twin", 0}, EdgeStatus::External));
}

TEST(CallGraph, InverseConsistencyOnSyntheticCorpus) {
    std::map<PatternLabel, int> spec;
    for (auto label : kAllPatternLabels) spec[label] = 3;
    const auto corpus = generate_synthetic_corpus(spec, 4);
    const auto code = parse_corpus(corpus.manifest);
    const auto g = build_call_graph(code);

    std::size_t call_sites = 0;
    for (const auto& f : code.files) {
        for (const auto& c : f.classes) {
            for (const auto& m : c.methods) call_sites += m.call_sites.size();
        }
    }
    EXPECT_LE(g.edges().size(), call_sites);
    for (const auto& e : g.edges()) {
        if (e.status == EdgeStatus::Resolved) {
            ASSERT_TRUE(g.contains(e.callee));
            const auto callers = g.callers(e.callee);
            EXPECT_NE(std::find(callers.begin(), callers.end(), e.caller), callers.end());
        }
    }
    for (const auto& n : g.nodes()) {
        for (const auto& caller : g.callers(n)) {
            const auto callees = g.callees(caller);
            EXPECT_NE(std::find(callees.begin(), callees.end(), n), callees.end());
            EXPECT_TRUE(has_edge(g, caller, n, EdgeStatus::Resolved));
        }
    }
    EXPECT_EQ(build_call_graph(code).edges(), g.edges());
}

TEST(CallGraph, DotExportMarksExternalEdges) {
    const auto g = graph_of({source("A.java", "class A { void m() { n(); Other.x(); } void n() {} }")});
    const auto dot = g.to_dot();
    EXPECT_NE(dot.find("\"A.m/0\" -> \"A.n/0\";"), std::string::npos) << dot;
    EXPECT_NE(dot.find("\"A.m/0\" -> \"Other.x/0\" [style=dashed];"), std::string::npos) << dot;
}
