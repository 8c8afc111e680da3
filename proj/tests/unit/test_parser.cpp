#include <gtest/gtest.h>

#include <algorithm>

#include "patmine/errors.hpp"
#include "patmine/java_lexer.hpp"
#include "patmine/java_parser.hpp"
#include "test_support.hpp"

using namespace patmine;
using patmine::testing::manifest_of;
using patmine::testing::source;

namespace {

std::size_t count_kind(const MethodModel& m, StatementKind k) {
    return static_cast<std::size_t>(
        std::count_if(m.statements.begin(), m.statements.end(), [&](const auto& s) { return s.kind == k; }));
}

const MethodModel& method(const ClassModel& c, const std::string& name) {
    for (const auto& m : c.methods) {
        if (m.name == name) return m;
    }
    throw std::runtime_error("no method " + name);
}

}  // namespace

TEST(Lexer, SkipsCommentsAndKeepsLiterals) {
    const auto toks = tokenize_java("/* c */ int x = 1; // trailing\nString s = \"a/*b\";");
    std::vector<std::string> texts;
    for (const auto& t : toks) texts.push_back(t.text);
    EXPECT_EQ(texts, (std::vector<std::string>{"int", "x", "=", "1", ";", "String", "s", "=", "\"a/*b\"", ";", ""}));
    EXPECT_EQ(toks[0].kind, TokenKind::Keyword);
    EXPECT_EQ(toks[5].line, 2u);
}

TEST(Lexer, UnterminatedLiteralsThrowWithPosition) {
    EXPECT_THROW(tokenize_java("String s = \"abc;\n"), SyntaxError);
    EXPECT_THROW(tokenize_java("/* never closed"), SyntaxError);
    try {
        tokenize_java("int a;\n  char c = 'x;");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 12u);
    }
}

TEST(Parser, SimpleClassWithInterface) {
    const auto classes = parse_source("public class Foo implements Bar { void run(){} }");
    ASSERT_EQ(classes.size(), 1u);
    const auto& c = classes[0];
    EXPECT_EQ(c.name, "Foo");
    EXPECT_EQ(c.kind, TypeKind::Class);
    EXPECT_TRUE(c.modifiers.has(Modifier::Public));
    EXPECT_EQ(c.modifiers.names(), (std::vector<std::string_view>{"public"}));
    EXPECT_EQ(c.implements_names, (std::vector<std::string>{"Bar"}));
    EXPECT_FALSE(c.extends_name.has_value());
    ASSERT_EQ(c.methods.size(), 1u);
    EXPECT_EQ(c.methods[0].name, "run");
    EXPECT_EQ(c.methods[0].return_type, "void");
    EXPECT_TRUE(c.methods[0].parameters.empty());
}

TEST(Parser, TwoTopLevelClassesInSourceOrder) {
    const auto classes = parse_source("class Zed {}\nclass Alpha {}\n");
    ASSERT_EQ(classes.size(), 2u);
    EXPECT_EQ(classes[0].name, "Zed");
    EXPECT_EQ(classes[1].name, "Alpha");
    EXPECT_TRUE(classes[1].modifiers.has(Modifier::Default));
}

TEST(Parser, UnbalancedBracesReportPosition) {
    try {
        parse_source("class A {\n  void f() {\n}\n");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_GE(e.line(), 1u);
        EXPECT_GE(e.column(), 1u);
    }
    EXPECT_THROW(parse_source("class A { void f() { int x = (1; } }"), SyntaxError);
}

TEST(Parser, LambdasAndMethodReferencesAreRejected) {
    EXPECT_THROW(parse_source("class A { void f() { Runnable r = () -> {}; } }"), SyntaxError);
    EXPECT_THROW(parse_source("class A { void f() { g(String::valueOf); } }"), SyntaxError);
}

TEST(Parser, ExtendsGenericsAndInterfaceExtension) {
    const auto classes = parse_source(
        "import java.util.*;\n"
        "@Deprecated public abstract class Repo<T extends Comparable<T>> extends Base<T> implements Iterable<T>, java.io.Serializable {}\n"
        "interface I extends J, K {}\n");
    ASSERT_EQ(classes.size(), 2u);
    EXPECT_EQ(classes[0].extends_name, std::optional<std::string>("Base"));
    EXPECT_EQ(classes[0].implements_names, (std::vector<std::string>{"Iterable", "java.io.Serializable"}));
    EXPECT_TRUE(classes[0].modifiers.has(Modifier::Abstract));
    EXPECT_EQ(classes[1].kind, TypeKind::Interface);
    EXPECT_EQ(classes[1].extends_name, std::optional<std::string>("J"));
    EXPECT_EQ(classes[1].implements_names, (std::vector<std::string>{"K"}));
}

TEST(Parser, NestedTypesAreNamedOuterInnerInPreOrder) {
    const auto classes = parse_source(
        "class Outer {\n"
        "  static class Inner { void a() {} class Deep {} }\n"
        "  enum Mode { ON, OFF; boolean on() { return this == ON; } }\n"
        "  void b() {}\n"
        "}\n");
    std::vector<std::string> names;
    for (const auto& c : classes) names.push_back(c.name);
    EXPECT_EQ(names, (std::vector<std::string>{"Outer", "Outer.Inner", "Outer.Inner.Deep", "Outer.Mode"}));
    EXPECT_EQ(classes[3].kind, TypeKind::Enum);
    ASSERT_EQ(classes[3].methods.size(), 1u);
    EXPECT_EQ(classes[0].methods.size(), 1u);
}

TEST(Parser, ConstructorsFieldsAndParameters) {
    const auto classes = parse_source(
        "class Point {\n"
        "  private final int x, y;\n"
        "  java.util.List<String> tags = new java.util.ArrayList<String>();\n"
        "  Point(int x, int y) { this.x = x; this.y = y; }\n"
        "  public static Point of(final int[] xs, String... rest) { return new Point(xs[0], xs[1]); }\n"
        "}\n");
    ASSERT_EQ(classes.size(), 1u);
    const auto& c = classes[0];
    ASSERT_EQ(c.fields.size(), 3u);
    EXPECT_EQ(c.fields[0], (NameAndType{"x", "int"}));
    EXPECT_EQ(c.fields[1], (NameAndType{"y", "int"}));
    EXPECT_EQ(c.fields[2].name, "tags");
    const auto& ctor = method(c, "Point");
    EXPECT_TRUE(ctor.is_constructor());
    EXPECT_EQ(ctor.parameters.size(), 2u);
    EXPECT_EQ(count_kind(ctor, StatementKind::Assignment), 2u);
    const auto& of = method(c, "of");
    EXPECT_EQ(of.return_type, "Point");
    ASSERT_EQ(of.parameters.size(), 2u);
    EXPECT_EQ(of.parameters[0].name, "xs");
    EXPECT_EQ(of.parameters[1].name, "rest");
    EXPECT_TRUE(of.call_sites.empty());  // object creation is not a call
}

TEST(Parser, StatementKindsAndCounts) {
    const auto classes = parse_source(
        "class S {\n"
        "  int f(int n) {\n"
        "    int total = 0;\n"
        "    for (int i = 0; i < n; i++) {\n"
        "      total += i;\n"
        "    }\n"
        "    if (total > 10) log(total); else total--;\n"
        "    while (n > 0) n--;\n"
        "    compute();\n"
        "    throw new IllegalStateException();\n"
        "  }\n"
        "  abstract void g();\n"
        "}\n");
    const auto& f = method(classes[0], "f");
    EXPECT_EQ(count_kind(f, StatementKind::LocalDeclaration), 1u);
    EXPECT_EQ(count_kind(f, StatementKind::Loop), 2u);
    EXPECT_EQ(count_kind(f, StatementKind::Conditional), 1u);
    EXPECT_EQ(count_kind(f, StatementKind::Assignment), 3u);
    EXPECT_EQ(count_kind(f, StatementKind::Invocation), 2u);
    EXPECT_EQ(count_kind(f, StatementKind::Other), 1u);
    EXPECT_EQ(f.local_variable_count, count_kind(f, StatementKind::LocalDeclaration));
    EXPECT_EQ(f.line_count, 8u);
    EXPECT_EQ(f.call_sites.size(), 2u);
    const auto& g = method(classes[0], "g");
    EXPECT_FALSE(g.has_body);
    EXPECT_EQ(g.line_count, 0u);
}

TEST(Parser, EmptyBodyHasNoStatementsAndZeroLines) {
    const auto& m = parse_source("class E { void f() {} void g() {\n} }")[0];
    for (const auto& meth : m.methods) {
        EXPECT_TRUE(meth.statements.empty());
        EXPECT_EQ(meth.line_count, 0u);
        EXPECT_EQ(meth.local_variable_count, 0u);
    }
}

TEST(Parser, CallSitesOncePerCallExpressionWithReceivers) {
    const auto classes = parse_source(
        "class R {\n"
        "  private Helper helper;\n"
        "  void f(Service svc) {\n"
        "    Buffer buf = new Buffer();\n"
        "    svc.start(1, g(2, 3));\n"
        "    helper.assist();\n"
        "    this.local();\n"
        "    Util.now();\n"
        "    System.out.println(buf.size());\n"
        "    java.util.Collections.sort(null);\n"
        "    this.helper.assist();\n"
        "  }\n"
        "}\n");
    const auto& f = method(classes[0], "f");
    std::map<std::string, CallSite> by_name;
    for (const auto& cs : f.call_sites) by_name[cs.callee_name + "/" + std::to_string(cs.line)] = cs;
    ASSERT_EQ(f.call_sites.size(), 9u);
    const auto find = [&](const std::string& name, std::size_t line) { return by_name.at(name + "/" + std::to_string(line)); };
    EXPECT_EQ(find("start", 5).receiver, ReceiverKind::TypedVariable);
    EXPECT_EQ(find("start", 5).receiver_type, "Service");
    EXPECT_EQ(find("start", 5).argument_count, 2u);
    EXPECT_EQ(find("g", 5).receiver, ReceiverKind::ImplicitThis);
    EXPECT_EQ(find("g", 5).argument_count, 2u);
    EXPECT_EQ(find("assist", 6).receiver_type, "Helper");
    EXPECT_EQ(find("local", 7).receiver, ReceiverKind::ImplicitThis);
    EXPECT_EQ(find("now", 8).receiver, ReceiverKind::StaticType);
    EXPECT_EQ(find("now", 8).receiver_type, "Util");
    EXPECT_EQ(find("println", 9).receiver, ReceiverKind::Unknown);
    EXPECT_EQ(find("size", 9).receiver_type, "Buffer");
    EXPECT_EQ(find("sort", 10).receiver, ReceiverKind::StaticType);
    EXPECT_EQ(find("assist", 11).receiver_type, "Helper");
}

TEST(Parser, AnonymousClassBodiesFoldIntoEnclosingMethod) {
    const auto classes = parse_source(
        "class W {\n"
        "  void f() {\n"
        "    Runnable r = new Runnable() {\n"
        "      public void run() { work(); }\n"
        "    };\n"
        "    r.run();\n"
        "  }\n"
        "}\n");
    ASSERT_EQ(classes.size(), 1u);
    ASSERT_EQ(classes[0].methods.size(), 1u);
    const auto& f = classes[0].methods[0];
    std::vector<std::string> callees;
    for (const auto& cs : f.call_sites) callees.push_back(cs.callee_name);
    EXPECT_EQ(callees, (std::vector<std::string>{"work", "run"}));
}

TEST(Parser, ReparsingIsStable) {
    const std::string src =
        "public class T<K> extends Base implements Api {\n"
        "  @Override public synchronized K get(K key) { try { return cache.get(key); } catch (Exception e) { return null; } }\n"
        "}\n";
    EXPECT_EQ(parse_source(src), parse_source(src));
}

TEST(ParseCorpus, CollectsDiagnosticsAndKeepsOrder) {
    const auto m = manifest_of({source("a/A.java", "class A {}"), source("b/B.java", "class B { void f( }"),
                                source("c/C.java", "class C {}")});
    const auto code = parse_corpus(m);
    ASSERT_EQ(code.files.size(), 2u);
    ASSERT_EQ(code.diagnostics.size(), 1u);
    EXPECT_EQ(code.diagnostics[0].file.path, "b/B.java");
    EXPECT_EQ(code.files[0].file.path, "a/A.java");
    EXPECT_EQ(code.files[1].file.path, "c/C.java");
    EXPECT_NE(code.find({"p", "c/C.java"}), nullptr);

    const auto three = manifest_of({source("A.java", "class A {}"), source("B.java", "class B {}"),
                                    source("C.java", "class C {}")});
    EXPECT_EQ(parse_corpus(three).files.size(), 3u);
    EXPECT_TRUE(parse_corpus(three).diagnostics.empty());
    EXPECT_TRUE(parse_corpus(CorpusManifest{}).files.empty());
}

TEST(ParseCorpus, ParallelMatchesSerial) {
    std::map<PatternLabel, int> spec;
    for (auto label : kAllPatternLabels) spec[label] = 4;
    auto corpus = generate_synthetic_corpus(spec, 9);
    corpus.manifest.files.push_back(source("zz/Broken.java", "class Broken {"));
    const auto par = parse_corpus(corpus.manifest);
    const auto ser = parse_corpus_serial(corpus.manifest);
    ASSERT_EQ(par.files.size(), ser.files.size());
    for (std::size_t i = 0; i < par.files.size(); ++i) {
        EXPECT_EQ(par.files[i].file, ser.files[i].file);
        EXPECT_EQ(par.files[i].classes, ser.files[i].classes);
    }
    ASSERT_EQ(par.diagnostics.size(), 1u);
    EXPECT_EQ(ser.diagnostics.size(), 1u);
}
