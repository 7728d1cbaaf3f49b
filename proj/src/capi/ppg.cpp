#include "ppg/ppg.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "builtins.hpp"
#include "compiler.hpp"
#include "errors.hpp"
#include "interaction.hpp"
#include "library.hpp"
#include "program.hpp"
#include "svg.hpp"
#include "vm.hpp"

struct ppg_compilation {
  ppg::CompileResult result;
  std::vector<std::string> formatted;
};

struct ppg_program {
  ppg::CompiledProgram cp;
};

struct ppg_canvas {
  ppg::Canvas canvas;
};

struct ppg_run_result {
  ppg::RunOutcome outcome;
  std::string kind;
  std::string message;
};

struct ppg_library {
  ppg::Library lib;
  std::vector<ppg::LibraryEntry> entries;
};

namespace {

thread_local std::string last_error;

ppg_status set_error(ppg_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Maps exceptions escaping the core to status codes.
template <typename F>
ppg_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const ppg::IoError& e) {
    return set_error(PPG_ERR_IO, e.what());
  } catch (const ppg::FormatError& e) {
    return set_error(PPG_ERR_FORMAT, e.what());
  } catch (const ppg::LibraryError& e) {
    return set_error(PPG_ERR_LIBRARY, e.what());
  } catch (const ppg::RuntimeError& e) {
    return set_error(PPG_ERR_RUNTIME, e.describe());
  } catch (const ppg::CompileError& e) {
    return set_error(PPG_ERR_COMPILE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PPG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PPG_ERR_INTERNAL, e.what());
  }
}

#define PPG_REQUIRE(cond)                                                  \
  do {                                                                     \
    if (!(cond)) return set_error(PPG_ERR_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

class CallbackProvider : public ppg::InteractionProvider {
 public:
  CallbackProvider(ppg_prompt_fn fn, void* user) : fn_(fn), user_(user) {}

  ppg::Answer ask(const ppg::Prompt& prompt) override {
    const char* reply = fn_(user_, ppg::prompt_to_json(prompt).c_str());
    if (!reply) ppg::fail(ppg::ErrorKind::interaction_abort, "dialog aborted by the client");
    try {
      return ppg::answer_from_json(reply);
    } catch (const ppg::FormatError& e) {
      ppg::fail(ppg::ErrorKind::interaction_abort, std::string("malformed answer: ") + e.what());
    }
  }

 private:
  ppg_prompt_fn fn_;
  void* user_;
};

}  // namespace

extern "C" {

const char* ppg_last_error(void) { return last_error.c_str(); }
const char* ppg_version(void) { return "1.0.0"; }
void ppg_string_free(char* s) { std::free(s); }
void ppg_buffer_free(uint8_t* data) { std::free(data); }

ppg_status ppg_compile(const char* source, const char* source_name, ppg_compilation** out) {
  PPG_REQUIRE(source && out);
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<ppg_compilation>();
    std::string name = source_name ? source_name : "<input>";
    c->result = ppg::compile_source(source, ppg::Registry::standard(), name);
    for (const auto& d : c->result.diagnostics()) c->formatted.push_back(ppg::format_diagnostic(d, name));
    bool ok = c->result.ok();
    *out = c.release();
    if (!ok) return set_error(PPG_ERR_COMPILE, "compilation failed");
    return PPG_OK;
  });
}

void ppg_compilation_free(ppg_compilation* c) { delete c; }

size_t ppg_compilation_diagnostic_count(const ppg_compilation* c) { return c ? c->formatted.size() : 0; }

const char* ppg_compilation_diagnostic(const ppg_compilation* c, size_t index, int* line, int* column) {
  if (!c || index >= c->formatted.size()) return nullptr;
  const auto& d = c->result.diagnostics()[index];
  if (line) *line = d.pos.line;
  if (column) *column = d.pos.column;
  return c->formatted[index].c_str();
}

ppg_status ppg_compilation_log(const ppg_compilation* c, int timestamps, char** out) {
  PPG_REQUIRE(c && out);
  return guarded([&] {
    *out = dup(ppg::format_compile_log(c->result.log, timestamps != 0));
    return PPG_OK;
  });
}

ppg_status ppg_compilation_take_program(ppg_compilation* c, ppg_program** out) {
  PPG_REQUIRE(c && out);
  *out = nullptr;
  if (!c->result.program) return set_error(PPG_ERR_COMPILE, "no program available");
  return guarded([&] {
    *out = new ppg_program{std::move(*c->result.program)};
    c->result.program.reset();
    return PPG_OK;
  });
}

void ppg_program_free(ppg_program* p) { delete p; }

const char* ppg_program_name(const ppg_program* p) { return p ? p->cp.name.c_str() : ""; }

ppg_status ppg_program_encode(const ppg_program* p, uint8_t** data, size_t* size) {
  PPG_REQUIRE(p && data && size);
  return guarded([&] {
    auto bytes = ppg::encode(p->cp);
    auto* buf = static_cast<uint8_t*>(std::malloc(bytes.empty() ? 1 : bytes.size()));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, bytes.data(), bytes.size());
    *data = buf;
    *size = bytes.size();
    return PPG_OK;
  });
}

ppg_status ppg_program_decode(const uint8_t* data, size_t size, ppg_program** out) {
  PPG_REQUIRE((data || size == 0) && out);
  *out = nullptr;
  return guarded([&] {
    auto cp = ppg::decode(std::span<const std::uint8_t>(data, size), ppg::Registry::standard());
    *out = new ppg_program{std::move(cp)};
    return PPG_OK;
  });
}

ppg_status ppg_program_disassemble(const ppg_program* p, char** out) {
  PPG_REQUIRE(p && out);
  return guarded([&] {
    *out = dup(ppg::disassemble(p->cp, ppg::Registry::standard()));
    return PPG_OK;
  });
}

ppg_canvas* ppg_canvas_new(void) { return new (std::nothrow) ppg_canvas; }
void ppg_canvas_free(ppg_canvas* c) { delete c; }
size_t ppg_canvas_element_count(const ppg_canvas* c) { return c ? c->canvas.visible_count() : 0; }

ppg_status ppg_canvas_dump(const ppg_canvas* c, char** out) {
  PPG_REQUIRE(c && out);
  return guarded([&] {
    *out = dup(ppg::dump_canvas(c->canvas));
    return PPG_OK;
  });
}

ppg_status ppg_canvas_render_svg(const ppg_canvas* c, double margin, int background, char** out) {
  PPG_REQUIRE(c && out && margin >= 0);
  return guarded([&] {
    ppg::RenderOptions opts;
    opts.margin = margin;
    opts.background = background != 0;
    *out = dup(ppg::render_svg(c->canvas, opts));
    return PPG_OK;
  });
}

ppg_status ppg_answer_validate(const char* json) {
  PPG_REQUIRE(json);
  return guarded([&] {
    ppg::answer_from_json(json);
    return PPG_OK;
  });
}

void ppg_run_options_init(ppg_run_options* o) {
  if (!o) return;
  *o = ppg_run_options{};
  o->mode = PPG_INTERACT_SCRIPT;
  o->recolor = -1;
}

ppg_status ppg_run(const ppg_program* p, ppg_canvas* canvas, const ppg_run_options* options, ppg_run_result** out) {
  PPG_REQUIRE(p && canvas && out);
  *out = nullptr;
  ppg_run_options defaults;
  if (!options) {
    ppg_run_options_init(&defaults);
    options = &defaults;
  }
  PPG_REQUIRE(options->mode != PPG_INTERACT_CALLBACK || options->callback);
  PPG_REQUIRE(options->recolor >= -1 && options->recolor <= 15);
  return guarded([&] {
    std::unique_ptr<ppg::InteractionProvider> provider;
    switch (options->mode) {
      case PPG_INTERACT_SCRIPT:
        provider = std::make_unique<ppg::ScriptedProvider>(
            options->answers_json ? ppg::answers_from_json(options->answers_json) : std::vector<ppg::Answer>{});
        break;
      case PPG_INTERACT_TERMINAL:
        provider = std::make_unique<ppg::TerminalProvider>(std::cin, std::cout);
        break;
      case PPG_INTERACT_CALLBACK:
        provider = std::make_unique<CallbackProvider>(options->callback, options->callback_user);
        break;
      default:
        return set_error(PPG_ERR_ARGUMENT, "unknown interaction mode");
    }
    auto limits = ppg::Limits::from_environment();
    if (options->max_steps) limits.max_steps = options->max_steps;
    auto r = std::make_unique<ppg_run_result>();
    r->outcome = ppg::run(p->cp, ppg::Registry::standard(), canvas->canvas, *provider, limits);
    if (options->place || options->recolor >= 0) {
      std::optional<std::int64_t> color;
      if (options->recolor >= 0) color = options->recolor;
      ppg::Point offset{options->place ? options->place_dx : 0.0, options->place ? options->place_dy : 0.0};
      canvas->canvas.finalize_placement(r->outcome.batch, offset, color);
    }
    ppg_status st = PPG_OK;
    if (r->outcome.error) {
      r->kind = ppg::to_string(r->outcome.error->kind());
      r->message = r->outcome.error->describe();
      st = set_error(PPG_ERR_RUNTIME, r->message);
    }
    *out = r.release();
    return st;
  });
}

void ppg_run_result_free(ppg_run_result* r) { delete r; }

ppg_run_status ppg_run_result_status(const ppg_run_result* r) {
  if (!r) return PPG_RUN_ERROR;
  switch (r->outcome.status) {
    case ppg::RunStatus::completed: return PPG_RUN_COMPLETED;
    case ppg::RunStatus::halted: return PPG_RUN_HALTED;
    default: return PPG_RUN_ERROR;
  }
}

const char* ppg_run_result_status_name(const ppg_run_result* r) {
  return r ? ppg::to_string(r->outcome.status) : "error";
}

uint64_t ppg_run_result_steps(const ppg_run_result* r) { return r ? r->outcome.steps : 0; }
const char* ppg_run_result_error_kind(const ppg_run_result* r) { return r ? r->kind.c_str() : ""; }
const char* ppg_run_result_error_message(const ppg_run_result* r) { return r ? r->message.c_str() : ""; }

uint32_t ppg_run_result_error_position(const ppg_run_result* r) {
  return r && r->outcome.error ? r->outcome.error->position() : 0;
}

ppg_status ppg_library_open(const char* path, ppg_library** out) {
  PPG_REQUIRE(path && *path && out);
  *out = nullptr;
  return guarded([&] {
    *out = new ppg_library{ppg::Library(path), {}};
    return PPG_OK;
  });
}

void ppg_library_free(ppg_library* l) { delete l; }

ppg_status ppg_library_count(ppg_library* l, size_t* count) {
  PPG_REQUIRE(l && count);
  return guarded([&] {
    l->entries = l->lib.entries();
    *count = l->entries.size();
    return PPG_OK;
  });
}

ppg_status ppg_library_entry(ppg_library* l, size_t index, const char** name, const char** comment) {
  PPG_REQUIRE(l);
  if (index >= l->entries.size()) return set_error(PPG_ERR_ARGUMENT, "entry index out of range");
  if (name) *name = l->entries[index].name.c_str();
  if (comment) *comment = l->entries[index].comment.c_str();
  return PPG_OK;
}

ppg_status ppg_library_add(ppg_library* l, const char* name, const char* comment, const ppg_program* p) {
  PPG_REQUIRE(l && name && *name && p);
  return guarded([&] {
    l->lib.add(name, comment ? comment : "", p->cp);
    return PPG_OK;
  });
}

ppg_status ppg_library_remove(ppg_library* l, const char* name) {
  PPG_REQUIRE(l && name);
  return guarded([&] {
    l->lib.remove(name);
    return PPG_OK;
  });
}

ppg_status ppg_library_load(ppg_library* l, const char* name, ppg_program** out) {
  PPG_REQUIRE(l && name && out);
  *out = nullptr;
  return guarded([&] {
    *out = new ppg_program{l->lib.load(name, ppg::Registry::standard())};
    return PPG_OK;
  });
}

}  // extern "C"
