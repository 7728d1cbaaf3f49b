#ifndef PPG_PPG_H
#define PPG_PPG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PPG_API __declspec(dllexport)
#else
#define PPG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ppg_status {
  PPG_OK = 0,
  PPG_ERR_COMPILE = 1,   /* source rejected; see the compilation's diagnostics */
  PPG_ERR_RUNTIME = 2,   /* program stopped with a runtime error */
  PPG_ERR_IO = 3,        /* file could not be read or written */
  PPG_ERR_ARGUMENT = 4,  /* null handle, bad option */
  PPG_ERR_FORMAT = 5,    /* corrupt or foreign bytecode / library / JSON */
  PPG_ERR_LIBRARY = 6,   /* unknown or duplicate library entry */
  PPG_ERR_INTERNAL = 7
} ppg_status;

typedef enum ppg_run_status {
  PPG_RUN_COMPLETED = 0,
  PPG_RUN_HALTED = 1, /* the program executed exit */
  PPG_RUN_ERROR = 2
} ppg_run_status;

typedef struct ppg_compilation ppg_compilation;
typedef struct ppg_program ppg_program;
typedef struct ppg_canvas ppg_canvas;
typedef struct ppg_run_result ppg_run_result;
typedef struct ppg_library ppg_library;

/* Message of the last failed call on this thread; never NULL. */
PPG_API const char* ppg_last_error(void);
PPG_API const char* ppg_version(void);

/* Strings and buffers returned through out-parameters are owned by the caller. */
PPG_API void ppg_string_free(char* s);
PPG_API void ppg_buffer_free(uint8_t* data);

/* ---- compilation ---- */

/* Always produces a compilation handle (unless out is NULL); returns
   PPG_ERR_COMPILE when the source has errors. */
PPG_API ppg_status ppg_compile(const char* source, const char* source_name, ppg_compilation** out);
PPG_API void ppg_compilation_free(ppg_compilation* c);
PPG_API size_t ppg_compilation_diagnostic_count(const ppg_compilation* c);
/* "path:line:col: error: message"; pointer valid while c lives. */
PPG_API const char* ppg_compilation_diagnostic(const ppg_compilation* c, size_t index, int* line, int* column);
PPG_API ppg_status ppg_compilation_log(const ppg_compilation* c, int timestamps, char** out);
/* Moves the program out; a second call fails. */
PPG_API ppg_status ppg_compilation_take_program(ppg_compilation* c, ppg_program** out);

/* ---- programs ---- */

PPG_API void ppg_program_free(ppg_program* p);
PPG_API const char* ppg_program_name(const ppg_program* p);
PPG_API ppg_status ppg_program_encode(const ppg_program* p, uint8_t** data, size_t* size);
PPG_API ppg_status ppg_program_decode(const uint8_t* data, size_t size, ppg_program** out);
PPG_API ppg_status ppg_program_disassemble(const ppg_program* p, char** out);

/* ---- canvas ---- */

PPG_API ppg_canvas* ppg_canvas_new(void);
PPG_API void ppg_canvas_free(ppg_canvas* c);
PPG_API size_t ppg_canvas_element_count(const ppg_canvas* c);
PPG_API ppg_status ppg_canvas_dump(const ppg_canvas* c, char** out);
/* margin in mm; background != 0 paints a white backdrop. */
PPG_API ppg_status ppg_canvas_render_svg(const ppg_canvas* c, double margin, int background, char** out);

/* ---- running ---- */

/* Receives a prompt as JSON and returns the answer as JSON. The returned
   string must stay valid until the next call or the end of the run. Returning
   NULL aborts the run with an interaction error. */
typedef const char* (*ppg_prompt_fn)(void* user, const char* prompt_json);

typedef enum ppg_interaction_mode {
  PPG_INTERACT_SCRIPT = 0,   /* answers_json: JSON array of answers */
  PPG_INTERACT_TERMINAL = 1, /* stdin / stdout dialog */
  PPG_INTERACT_CALLBACK = 2
} ppg_interaction_mode;

typedef struct ppg_run_options {
  ppg_interaction_mode mode;
  const char* answers_json;
  ppg_prompt_fn callback;
  void* callback_user;
  /* Post-run placement of the new elements. */
  int place;
  double place_dx, place_dy;
  int recolor; /* -1: keep colours */
  /* 0: default / PGEN_STEP_LIMIT */
  uint64_t max_steps;
} ppg_run_options;

/* PPG_OK when `json` is a well-formed answer object, PPG_ERR_FORMAT otherwise. */
PPG_API ppg_status ppg_answer_validate(const char* json);

PPG_API void ppg_run_options_init(ppg_run_options* o);

/* options may be NULL for defaults (empty answer script).
   PPG_OK when the program completed or exited; PPG_ERR_RUNTIME with a result
   describing the error otherwise. The result handle is produced in both cases. */
PPG_API ppg_status ppg_run(const ppg_program* p, ppg_canvas* canvas, const ppg_run_options* options,
                           ppg_run_result** out);
PPG_API void ppg_run_result_free(ppg_run_result* r);
PPG_API ppg_run_status ppg_run_result_status(const ppg_run_result* r);
/* "completed", "halted-by-exit", "error" */
PPG_API const char* ppg_run_result_status_name(const ppg_run_result* r);
PPG_API uint64_t ppg_run_result_steps(const ppg_run_result* r);
/* Empty strings / 0 when there is no error. */
PPG_API const char* ppg_run_result_error_kind(const ppg_run_result* r);
PPG_API const char* ppg_run_result_error_message(const ppg_run_result* r);
PPG_API uint32_t ppg_run_result_error_position(const ppg_run_result* r);

/* ---- libraries ---- */

PPG_API ppg_status ppg_library_open(const char* path, ppg_library** out);
PPG_API void ppg_library_free(ppg_library* l);
/* Refreshes the entry list from disk. */
PPG_API ppg_status ppg_library_count(ppg_library* l, size_t* count);
/* Valid until the next call on l. */
PPG_API ppg_status ppg_library_entry(ppg_library* l, size_t index, const char** name, const char** comment);
PPG_API ppg_status ppg_library_add(ppg_library* l, const char* name, const char* comment, const ppg_program* p);
PPG_API ppg_status ppg_library_remove(ppg_library* l, const char* name);
PPG_API ppg_status ppg_library_load(ppg_library* l, const char* name, ppg_program** out);

#ifdef __cplusplus
}
#endif

#endif
