// ppg — compile, run, render and manage drawing-generation programs.
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppg/ppg.h"
#include "session/server.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kCompile = 1, kRuntime = 2, kIo = 3, kUsage = 4 };

struct CString {
  char* p = nullptr;
  ~CString() { ppg_string_free(p); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Program = Handle<ppg_program, ppg_program_free>;
using Canvas = Handle<ppg_canvas, ppg_canvas_free>;
using RunResult = Handle<ppg_run_result, ppg_run_result_free>;
using Library = Handle<ppg_library, ppg_library_free>;
using Compilation = Handle<ppg_compilation, ppg_compilation_free>;

struct Failure {
  int code;
};

[[noreturn]] void die(int code, const std::string& msg) {
  std::cerr << "ppg: " << msg << "\n";
  throw Failure{code};
}

int exit_for(ppg_status s) {
  switch (s) {
    case PPG_OK: return kOk;
    case PPG_ERR_COMPILE: return kCompile;
    case PPG_ERR_RUNTIME: return kRuntime;
    case PPG_ERR_ARGUMENT: return kUsage;
    default: return kIo;
  }
}

void check(ppg_status s) {
  if (s != PPG_OK) die(exit_for(s), ppg_last_error());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(kIo, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) die(kIo, "cannot write '" + path + "'");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) die(kIo, "cannot write '" + path + "'");
}

void write_text(const std::string& path, const std::string& text) { write_file(path, text.data(), text.size()); }

/// Compiles a source file, printing diagnostics; exits 1 on errors.
void compile_file(const std::string& path, const std::string& log_path, Program& out) {
  std::string text = read_text(path);
  Compilation c;
  ppg_status s = ppg_compile(text.c_str(), path.c_str(), &c.p);
  if (!c.p) check(s);
  for (size_t i = 0; i < ppg_compilation_diagnostic_count(c.p); ++i) {
    std::cerr << ppg_compilation_diagnostic(c.p, i, nullptr, nullptr) << "\n";
  }
  if (!log_path.empty()) {
    CString log;
    check(ppg_compilation_log(c.p, 0, &log.p));
    write_text(log_path, log.p);
  }
  if (s != PPG_OK) throw Failure{exit_for(s)};
  check(ppg_compilation_take_program(c.p, &out.p));
}

void load_program(const std::string& path, Program& out) {
  if (fs::path(path).extension() == ".ppgc") {
    std::string bytes = read_text(path);
    check(ppg_program_decode(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size(), &out.p));
  } else {
    compile_file(path, "", out);
  }
}

struct RunFlags {
  std::string answers;
  bool interactive = false;
  std::string place;
  int color = -1;
  std::string render;
  std::string dump;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  auto* answers = cmd->add_option("--answers", f.answers, "JSON answer script: a file, or an inline array");
  cmd->add_flag("--interactive", f.interactive, "answer prompts on the terminal")->excludes(answers);
  cmd->add_option("--place", f.place, "translate the new elements by dx,dy");
  cmd->add_option("--color", f.color, "recolor the new elements")->check(CLI::Range(0, 15));
  cmd->add_option("--render", f.render, "write an SVG rendering");
  cmd->add_option("--dump", f.dump, "write the canvas dump");
}

int execute(const ppg_program* program, const RunFlags& f, const std::string& label) {
  ppg_run_options opts;
  ppg_run_options_init(&opts);
  std::string script = "[]";
  if (f.interactive) {
    opts.mode = PPG_INTERACT_TERMINAL;
  } else if (!f.answers.empty()) {
    auto first = f.answers.find_first_not_of(" \t\r\n");
    script = first != std::string::npos && f.answers[first] == '[' ? f.answers : read_text(f.answers);
  }
  opts.answers_json = script.c_str();
  if (!f.place.empty()) {
    double dx = 0, dy = 0;
    char tail = 0;
    if (std::sscanf(f.place.c_str(), "%lf,%lf%c", &dx, &dy, &tail) != 2) die(kUsage, "--place expects dx,dy");
    opts.place = 1;
    opts.place_dx = dx;
    opts.place_dy = dy;
  }
  opts.recolor = f.color;

  Canvas canvas;
  canvas.p = ppg_canvas_new();
  RunResult result;
  ppg_status s = ppg_run(program, canvas.p, &opts, &result.p);
  if (!result.p) check(s);

  if (!f.dump.empty()) {
    CString dump;
    check(ppg_canvas_dump(canvas.p, &dump.p));
    write_text(f.dump, dump.p);
  }
  if (!f.render.empty()) {
    CString svg;
    check(ppg_canvas_render_svg(canvas.p, 10.0, 0, &svg.p));
    write_text(f.render, svg.p);
  }
  if (s == PPG_ERR_RUNTIME) {
    std::cerr << label << ": runtime error: " << ppg_run_result_error_message(result.p) << "\n";
    return kRuntime;
  }
  std::cerr << label << ": " << ppg_run_result_status_name(result.p) << ", " << ppg_canvas_element_count(canvas.p)
            << " element(s)\n";
  return kOk;
}

int cmd_compile(const std::string& src, std::string out, const std::string& log, bool disasm) {
  Program p;
  compile_file(src, log, p);
  if (out.empty()) out = fs::path(src).replace_extension(".ppgc").string();
  uint8_t* data = nullptr;
  size_t size = 0;
  check(ppg_program_encode(p.p, &data, &size));
  std::unique_ptr<uint8_t, void (*)(uint8_t*)> guard(data, ppg_buffer_free);
  write_file(out, data, size);
  if (disasm) {
    CString text;
    check(ppg_program_disassemble(p.p, &text.p));
    std::cout << text.p;
  }
  return kOk;
}

void open_library(const std::string& path, Library& lib) { check(ppg_library_open(path.c_str(), &lib.p)); }

int cmd_lib_list(const std::string& path) {
  Library lib;
  open_library(path, lib);
  size_t n = 0;
  check(ppg_library_count(lib.p, &n));
  for (size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    const char* comment = nullptr;
    check(ppg_library_entry(lib.p, i, &name, &comment));
    std::cout << name;
    if (*comment) std::cout << "\t" << comment;
    std::cout << "\n";
  }
  return kOk;
}

int cmd_lib_add(const std::string& path, const std::string& name, const std::string& src, const std::string& comment) {
  Program p;
  load_program(src, p);
  Library lib;
  open_library(path, lib);
  check(ppg_library_add(lib.p, name.c_str(), comment.c_str(), p.p));
  return kOk;
}

int cmd_lib_remove(const std::string& path, const std::string& name) {
  Library lib;
  open_library(path, lib);
  check(ppg_library_remove(lib.p, name.c_str()));
  return kOk;
}

int cmd_lib_run(const std::string& path, const std::string& name, const RunFlags& f) {
  Library lib;
  open_library(path, lib);
  Program p;
  check(ppg_library_load(lib.p, name.c_str(), &p.p));
  return execute(p.p, f, path + ":" + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compiler, virtual machine and library tool for parametric drawing programs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ppg_version());

  std::string src, out, log;
  bool disasm = false;
  auto* compile = app.add_subcommand("compile", "compile a source program to bytecode");
  compile->add_option("source", src, "program source (.ppg)")->required();
  compile->add_option("-o,--output", out, "bytecode file (default: source with .ppgc)");
  compile->add_option("--log", log, "write the compilation log");
  compile->add_flag("--disassemble", disasm, "print the compiled code");

  RunFlags run_flags;
  std::string prog;
  auto* run = app.add_subcommand("run", "execute a program");
  run->add_option("program", prog, "source (.ppg) or bytecode (.ppgc)")->required();
  add_run_flags(run, run_flags);

  std::string lib_path, entry, entry_src, comment;
  auto* lib = app.add_subcommand("lib", "manage a program library");
  lib->add_option("library", lib_path, "library file (.ppglib)")->required();
  lib->require_subcommand(1);
  auto* lib_list = lib->add_subcommand("list", "list entries");
  auto* lib_add = lib->add_subcommand("add", "compile and add a program");
  lib_add->add_option("name", entry)->required();
  lib_add->add_option("source", entry_src)->required();
  lib_add->add_option("--comment", comment, "entry comment");
  auto* lib_remove = lib->add_subcommand("remove", "remove an entry");
  lib_remove->add_option("name", entry)->required();
  RunFlags lib_run_flags;
  auto* lib_run = lib->add_subcommand("run", "run an entry");
  lib_run->add_option("name", entry)->required();
  add_run_flags(lib_run, lib_run_flags);

  ppg::session::ServerOptions serve_opts;
  auto* serve = app.add_subcommand("serve", "serve interactive sessions over HTTP and WebSocket");
  serve->add_option("--port", serve_opts.port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--address", serve_opts.address, "listen address");
  serve->add_option("--libraries", serve_opts.library_dir, "directory of .ppglib files");
  serve->add_option("--static", serve_opts.static_dir, "directory of web client assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compile) return cmd_compile(src, out, log, disasm);
    if (*run) {
      Program p;
      load_program(prog, p);
      return execute(p.p, run_flags, prog);
    }
    if (*lib_list) return cmd_lib_list(lib_path);
    if (*lib_add) return cmd_lib_add(lib_path, entry, entry_src, comment);
    if (*lib_remove) return cmd_lib_remove(lib_path, entry);
    if (*lib_run) return cmd_lib_run(lib_path, entry, lib_run_flags);
    if (*serve) return ppg::session::serve_forever(serve_opts);
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "ppg: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
