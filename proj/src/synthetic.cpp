#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "patmine/corpus.hpp"
#include "patmine/random.hpp"

namespace patmine {

namespace {

using Vars = std::map<std::string, std::string>;

// Replaces every ${name} with vars[name].
std::string fill(std::string_view tmpl, const Vars& vars) {
    std::string out;
    out.reserve(tmpl.size() + 64);
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '$' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
            const auto close = tmpl.find('}', i);
            const std::string key(tmpl.substr(i + 2, close - i - 2));
            out += vars.at(key);
            i = close + 1;
        } else {
            out += tmpl[i++];
        }
    }
    return out;
}

const std::vector<std::string> kNouns = {
    "Account", "Invoice", "Order",   "Customer", "Sensor",  "Report",  "Ticket",  "Payment",
    "Shipment", "Document", "Session", "Message",  "Product", "Vehicle", "Booking", "Profile",
    "Archive", "Channel",  "Device",  "Schedule", "Catalog", "Ledger",  "Recipe",  "Station",
};

const std::vector<std::string> kFields = {
    "name", "size", "count", "title", "owner", "status", "amount", "label", "code", "weight",
};

const std::vector<std::string> kFieldTypes = {"String", "int", "long", "double", "boolean"};

std::string capitalize(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::string default_value(const std::string& type) {
    if (type == "String") return "\"\"";
    if (type == "boolean") return "false";
    if (type == "double") return "0.0";
    if (type == "long") return "0L";
    return "0";
}

struct Field {
    std::string name;
    std::string type;
};

std::vector<Field> pick_fields(Rng& rng, std::size_t n) {
    std::vector<std::string> names = kFields;
    rng.shuffle(names);
    std::vector<Field> out;
    for (std::size_t i = 0; i < n && i < names.size(); ++i) {
        out.push_back({names[i], rng.pick(kFieldTypes)});
    }
    return out;
}

std::string field_decls(const std::vector<Field>& fields, const std::string& indent = "    ") {
    std::string out;
    for (const auto& f : fields) out += indent + "private " + f.type + " " + f.name + ";\n";
    return out;
}

std::string getters(const std::vector<Field>& fields) {
    std::string out;
    for (const auto& f : fields) {
        out += "\n    public " + f.type + " get" + capitalize(f.name) + "() {\n        return " +
               f.name + ";\n    }\n";
    }
    return out;
}

struct Generated {
    std::string class_name;
    std::string source;
};

Generated singleton(Rng& rng, const std::string& noun, int id) {
    static const std::vector<std::string> roles = {"Registry", "Manager", "Config", "Cache", "Service"};
    static const std::vector<std::string> accessors = {"getInstance", "getInstance", "instance",
                                                       "getDefault"};
    const std::string cls = noun + rng.pick(roles) + std::to_string(id);
    const auto fields = pick_fields(rng, 1 + rng.index(3));
    std::string init;
    for (const auto& f : fields) init += "        this." + f.name + " = " + default_value(f.type) + ";\n";
    Vars v{{"cls", cls}, {"fields", field_decls(fields)}, {"init", init},
           {"accessor", rng.pick(accessors)}, {"getters", getters(fields)}};
    const bool eager = rng.index(4) == 0;
    if (eager) {
        return {cls, fill(R"(package synth.singleton;

public final class ${cls} {
    private static final ${cls} INSTANCE = new ${cls}();
${fields}
    private ${cls}() {
${init}    }

    public static ${cls} ${accessor}() {
        return INSTANCE;
    }
${getters}}
)", v)};
    }
    return {cls, fill(R"(package synth.singleton;

public class ${cls} {
    private static ${cls} instance;
${fields}
    private ${cls}() {
${init}    }

    public static synchronized ${cls} ${accessor}() {
        if (instance == null) {
            instance = new ${cls}();
        }
        return instance;
    }
${getters}}
)", v)};
}

Generated adapter(Rng& rng, const std::string& noun, int id) {
    static const std::vector<std::string> requests = {"request", "handle", "process", "execute"};
    static const std::vector<std::string> specifics = {"specificRequest", "legacyCall", "doWork",
                                                       "runOld", "performLegacy"};
    const std::string cls = noun + "Adapter" + std::to_string(id);
    const std::string req = rng.pick(requests);
    Vars v{{"cls", cls}, {"noun", noun}, {"req", req}, {"spec", rng.pick(specifics)},
           {"conv", rng.index(2) ? "convert" : "translate"}};
    return {cls, fill(R"(package synth.adapter;

public class ${cls} implements ${noun}Target {
    private final Legacy${noun} adaptee;

    public ${cls}(Legacy${noun} adaptee) {
        this.adaptee = adaptee;
    }

    public String ${req}(String input) {
        String converted = ${conv}(input);
        return adaptee.${spec}(converted);
    }

    private String ${conv}(String input) {
        return input.trim();
    }
}
)", v)};
}

Generated builder(Rng& rng, const std::string& noun, int id) {
    const std::string cls = noun + "Builder" + std::to_string(id);
    const auto fields = pick_fields(rng, 2 + rng.index(3));
    const bool with_prefix = rng.index(3) != 0;
    std::string setters;
    std::string args;
    for (const auto& f : fields) {
        const std::string setter = with_prefix ? "with" + capitalize(f.name) : f.name;
        setters += "\n    public " + cls + " " + setter + "(" + f.type + " " + f.name +
                   ") {\n        this." + f.name + " = " + f.name + ";\n        return this;\n    }\n";
        if (!args.empty()) args += ", ";
        args += f.name;
    }
    Vars v{{"cls", cls}, {"noun", noun}, {"fields", field_decls(fields)}, {"setters", setters},
           {"args", args}};
    return {cls, fill(R"(package synth.builder;

public class ${cls} {
${fields}
    public ${cls}() {
    }
${setters}
    public ${noun} build() {
        return new ${noun}(${args});
    }
}
)", v)};
}

Generated observer(Rng& rng, const std::string& noun, int id) {
    static const std::vector<std::string> listener_words = {"Listener", "Observer", "Watcher"};
    static const std::vector<std::string> notify_words = {"notifyListeners", "notifyObservers",
                                                          "fireChanged", "publish"};
    static const std::vector<std::string> update_words = {"update", "onChange", "changed"};
    const std::string lw = rng.pick(listener_words);
    const std::string cls = noun + "Subject" + std::to_string(id);
    const auto fields = pick_fields(rng, 1 + rng.index(2));
    Vars v{{"cls", cls}, {"lis", noun + lw}, {"lw", lw}, {"notify", rng.pick(notify_words)},
           {"update", rng.pick(update_words)}, {"fields", field_decls(fields)},
           {"field", fields[0].name}, {"ftype", fields[0].type}, {"Field", capitalize(fields[0].name)}};
    return {cls, fill(R"(package synth.observer;

import java.util.ArrayList;
import java.util.List;

public class ${cls} {
    private final List<${lis}> observers = new ArrayList<${lis}>();
${fields}
    public void add${lw}(${lis} observer) {
        observers.add(observer);
    }

    public void remove${lw}(${lis} observer) {
        observers.remove(observer);
    }

    public void set${Field}(${ftype} ${field}) {
        this.${field} = ${field};
        ${notify}();
    }

    protected void ${notify}() {
        for (${lis} observer : observers) {
            observer.${update}(this);
        }
    }
}
)", v)};
}

Generated none(Rng& rng, const std::string& noun, int id) {
    static const std::vector<std::string> roles = {"Utils", "Record", "Helper", "Calculator", "Data"};
    const std::string cls = noun + rng.pick(roles) + std::to_string(id);
    const auto fields = pick_fields(rng, 2 + rng.index(3));
    std::string setters;
    for (const auto& f : fields) {
        setters += "\n    public void set" + capitalize(f.name) + "(" + f.type + " value) {\n        this." +
                   f.name + " = value;\n    }\n";
    }
    Vars v{{"cls", cls}, {"fields", field_decls(fields)}, {"getters", getters(fields)},
           {"setters", setters}};
    const bool with_compute = rng.index(2) == 0;
    v["compute"] = with_compute ? R"(
    public int total(int[] values) {
        int sum = 0;
        for (int i = 0; i < values.length; i++) {
            sum += values[i];
        }
        return sum;
    }
)"
                                : "";
    return {cls, fill(R"(package synth.none;

public class ${cls} {
${fields}${getters}${setters}${compute}}
)", v)};
}

Generated decorator(Rng& rng, const std::string& noun, int id) {
    static const std::vector<std::string> ops = {"operation", "render", "draw", "send"};
    const std::string cls = noun + "Decorator" + std::to_string(id);
    Vars v{{"cls", cls}, {"noun", noun}, {"op", rng.pick(ops)}};
    return {cls, fill(R"(package synth.decorator;

public class ${cls} implements ${noun}Component {
    protected final ${noun}Component component;

    public ${cls}(${noun}Component component) {
        this.component = component;
    }

    public void ${op}() {
        before();
        component.${op}();
        after();
    }

    private void before() {
    }

    private void after() {
    }
}
)", v)};
}

Generated facade(Rng& rng, const std::string& noun, int id) {
    const std::string cls = noun + "Facade" + std::to_string(id);
    Vars v{{"cls", cls}, {"noun", noun}, {"op", rng.index(2) ? "start" : "perform"}};
    return {cls, fill(R"(package synth.facade;

public class ${cls} {
    private final ${noun}Loader loader = new ${noun}Loader();
    private final ${noun}Validator validator = new ${noun}Validator();
    private final ${noun}Store store = new ${noun}Store();

    public void ${op}(String key) {
        String raw = loader.load(key);
        if (validator.validate(raw)) {
            store.save(raw);
        }
    }
}
)", v)};
}

Generated factory(Rng& rng, const std::string& noun, int id) {
    const std::string cls = noun + "Factory" + std::to_string(id);
    Vars v{{"cls", cls}, {"noun", noun}, {"create", rng.index(2) ? "create" : "make"}};
    return {cls, fill(R"(package synth.factory;

public class ${cls} {
    public ${noun} ${create}${noun}(String type) {
        if (type.equals("basic")) {
            return new Basic${noun}();
        } else if (type.equals("premium")) {
            return new Premium${noun}();
        }
        return new Default${noun}();
    }
}
)", v)};
}

Generated memento(Rng& rng, const std::string& noun, int id) {
    const std::string cls = noun + "Originator" + std::to_string(id);
    const auto fields = pick_fields(rng, 1);
    Vars v{{"cls", cls}, {"noun", noun}, {"ftype", fields[0].type}, {"field", fields[0].name}};
    return {cls, fill(R"(package synth.memento;

public class ${cls} {
    private ${ftype} ${field};

    public ${noun}Memento save() {
        return new ${noun}Memento(${field});
    }

    public void restore(${noun}Memento memento) {
        this.${field} = memento.getState();
    }
}
)", v)};
}

Generated prototype(Rng& rng, const std::string& noun, int id) {
    const std::string cls = noun + "Prototype" + std::to_string(id);
    const auto fields = pick_fields(rng, 2);
    Vars v{{"cls", cls}, {"fields", field_decls(fields)}, {"a", fields[0].name}, {"b", fields[1].name}};
    return {cls, fill(R"(package synth.prototype;

public class ${cls} implements Cloneable {
${fields}
    public ${cls} clone() {
        ${cls} copy = new ${cls}();
        copy.${a} = this.${a};
        copy.${b} = this.${b};
        return copy;
    }
}
)", v)};
}

Generated proxy(Rng& rng, const std::string& noun, int id) {
    const std::string cls = noun + "Proxy" + std::to_string(id);
    Vars v{{"cls", cls}, {"noun", noun}, {"op", rng.index(2) ? "fetch" : "display"}};
    return {cls, fill(R"(package synth.proxy;

public class ${cls} implements ${noun}Subject {
    private Real${noun} real;

    public String ${op}(String key) {
        if (real == null) {
            real = new Real${noun}();
        }
        return real.${op}(key);
    }
}
)", v)};
}

Generated visitor(Rng& rng, const std::string& noun, int id) {
    const std::string cls = noun + "Visitor" + std::to_string(id);
    Vars v{{"cls", cls}, {"noun", noun}, {"acc", rng.index(2) ? "total" : "result"}};
    return {cls, fill(R"(package synth.visitor;

public class ${cls} implements ${noun}ElementVisitor {
    private int ${acc};

    public void visit(${noun}Leaf leaf) {
        ${acc} += leaf.getValue();
    }

    public void visit(${noun}Group group) {
        for (${noun}Element child : group.getChildren()) {
            child.accept(this);
        }
    }
}
)", v)};
}

Generated wrapper(Rng& rng, const std::string& noun, int id) {
    const std::string cls = noun + "Wrapper" + std::to_string(id);
    Vars v{{"cls", cls}, {"noun", noun}};
    (void)rng;
    return {cls, fill(R"(package synth.wrapper;

public class ${cls} {
    private final ${noun} wrapped;

    public ${cls}(${noun} wrapped) {
        this.wrapped = wrapped;
    }

    public String getName() {
        return wrapped.getName();
    }

    public int getSize() {
        return wrapped.getSize();
    }
}
)", v)};
}

Generated generate_one(PatternLabel label, Rng& rng, int id) {
    const std::string noun = rng.pick(kNouns);
    switch (label) {
        case PatternLabel::Singleton: return singleton(rng, noun, id);
        case PatternLabel::Adapter: return adapter(rng, noun, id);
        case PatternLabel::Builder: return builder(rng, noun, id);
        case PatternLabel::Observer: return observer(rng, noun, id);
        case PatternLabel::Decorator: return decorator(rng, noun, id);
        case PatternLabel::Facade: return facade(rng, noun, id);
        case PatternLabel::Factory: return factory(rng, noun, id);
        case PatternLabel::Memento: return memento(rng, noun, id);
        case PatternLabel::Prototype: return prototype(rng, noun, id);
        case PatternLabel::Proxy: return proxy(rng, noun, id);
        case PatternLabel::Visitor: return visitor(rng, noun, id);
        case PatternLabel::Wrapper: return wrapper(rng, noun, id);
        case PatternLabel::None: return none(rng, noun, id);
    }
    return none(rng, noun, id);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const std::map<PatternLabel, int>& counts,
                                          std::uint64_t seed) {
    SyntheticCorpus out;
    for (const auto& [label, count] : counts) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
        for (int i = 0; i < count; ++i) {
            auto gen = generate_one(label, rng, i + 1);
            SourceFile file;
            file.project_id = "synth";
            file.relative_path = "src/main/java/synth/" + lower(to_string(label)) + "/" +
                                 gen.class_name + ".java";
            file.content = std::move(gen.source);
            out.labels.push_back({file.key(), gen.class_name, label});
            out.manifest.files.push_back(std::move(file));
        }
    }
    std::sort(out.manifest.files.begin(), out.manifest.files.end(),
              [](const SourceFile& a, const SourceFile& b) { return a.key() < b.key(); });
    std::sort(out.labels.begin(), out.labels.end(),
              [](const LabelledInstance& a, const LabelledInstance& b) { return a.file < b.file; });
    return out;
}

}  // namespace patmine
