#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "amdl/compile.hpp"
#include "amdl/dsl.hpp"
#include "amdl/emit.hpp"
#include "amdl/lift.hpp"

namespace {

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return true;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

std::optional<amdl::AbstractModel> parse_file(const std::string& path, const std::string& source,
                                              int& status) {
    amdl::ParseResult result = amdl::parse_model(source, path);
    for (const auto& d : result.diagnostics) std::cerr << amdl::to_string(d) << "\n";
    if (!result.diagnostics.empty() || !result.ok()) {
        status = 1;
        return std::nullopt;
    }
    status = 0;
    return std::move(result.model);
}

int cmd_check(const std::string& path) {
    auto source = read_file(path);
    if (!source) {
        std::cerr << "error: cannot read " << path << "\n";
        return 2;
    }
    amdl::ParseResult result = amdl::parse_model(*source, path);
    for (const auto& d : result.diagnostics) std::cerr << amdl::to_string(d) << "\n";
    return result.diagnostics.empty() ? 0 : 1;
}

int cmd_compile(const std::string& path, const std::string& to, const std::string& out_path) {
    auto source = read_file(path);
    if (!source) {
        std::cerr << "error: cannot read " << path << "\n";
        return 2;
    }
    int status = 0;
    auto model = parse_file(path, *source, status);
    if (!model) return status;

    std::string text;
    try {
        amdl::RelationalSchema schema = amdl::compile_model(*model);
        text = to == "sql" ? amdl::emit_sql(schema) : amdl::emit_json(schema);
    } catch (const amdl::Error& e) {
        std::cerr << path << ": error: " << e.what() << "\n";
        return 1;
    }
    if (!write_output(out_path, text)) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 2;
    }
    return 0;
}

int cmd_lift(const std::string& path, const std::string& out_path) {
    auto source = read_file(path);
    if (!source) {
        std::cerr << "error: cannot read " << path << "\n";
        return 2;
    }
    amdl::LoadResult loaded = amdl::load_json(*source);
    if (loaded.malformed) {
        for (const auto& e : loaded.errors) std::cerr << path << ": error: " << e << "\n";
        return 2;
    }
    if (!loaded.ok()) {
        for (const auto& e : loaded.errors) std::cerr << path << ": error: " << e << "\n";
        return 1;
    }

    amdl::LiftReport report = amdl::lift_schema(*loaded.schema);
    for (const auto& w : report.warnings) std::cerr << path << ": warning: " << w << "\n";
    for (const auto& [table, why] : report.excluded_tables)
        std::cerr << path << ": warning: table " << table << " excluded: " << why << "\n";
    if (!write_output(out_path, amdl::format_model(report.model))) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 2;
    }
    return 0;
}

int cmd_emit_text(const std::string& path, bool hierarchy) {
    auto source = read_file(path);
    if (!source) {
        std::cerr << "error: cannot read " << path << "\n";
        return 2;
    }
    int status = 0;
    auto model = parse_file(path, *source, status);
    if (!model) return status;
    std::cout << (hierarchy ? amdl::emit_hierarchy(*model).text() : amdl::emit_graph(*model));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"amdlc - abstract data model compiler"};
    app.require_subcommand(1);

    std::string check_file;
    CLI::App* check = app.add_subcommand("check", "Validate a model file");
    check->add_option("file", check_file, "model file (.amdl)")->required();

    std::string compile_file, compile_to, compile_out;
    CLI::App* compile = app.add_subcommand("compile", "Compile a model to a relational schema");
    compile->add_option("file", compile_file, "model file (.amdl)")->required();
    compile->add_option("--to", compile_to, "output format")
        ->required()
        ->check(CLI::IsMember({"sql", "json"}));
    compile->add_option("--out", compile_out, "output path (default: standard output)");

    std::string lift_file, lift_out;
    CLI::App* lift = app.add_subcommand("lift", "Reconstruct a model from a schema document");
    lift->add_option("file", lift_file, "schema document (.json)")->required();
    lift->add_option("--out", lift_out, "output path (default: standard output)");

    std::string hier_file;
    CLI::App* hier = app.add_subcommand("hier", "Print the hierarchical form of a model");
    hier->add_option("file", hier_file, "model file (.amdl)")->required();

    std::string graph_file;
    CLI::App* graph = app.add_subcommand("graph", "Print the reference graph of a model");
    graph->add_option("file", graph_file, "model file (.amdl)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (check->parsed()) return cmd_check(check_file);
        if (compile->parsed()) return cmd_compile(compile_file, compile_to, compile_out);
        if (lift->parsed()) return cmd_lift(lift_file, lift_out);
        if (hier->parsed()) return cmd_emit_text(hier_file, true);
        if (graph->parsed()) return cmd_emit_text(graph_file, false);
    } catch (const std::exception& e) {
        std::cerr << "amdlc: internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
