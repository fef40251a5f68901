/* C interface to the fuzzybridge regression toolkit.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an fb_status; on failure fb_last_error() holds
 * a message for the calling thread until its next call into the library.
 * Strings handed out through char** parameters are owned by the caller and
 * released with fb_string_free. */
#ifndef FUZZYBRIDGE_H
#define FUZZYBRIDGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(FB_BUILDING_LIBRARY)
#define FB_API __attribute__((visibility("default")))
#else
#define FB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* The non-zero values double as the command-line exit codes. */
typedef enum fb_status {
    FB_OK = 0,
    FB_ERR_INTERNAL = 1,         /* unexpected failure (out of memory, ...) */
    FB_ERR_INVALID_ARGUMENT = 2, /* bad option, flag value or precondition */
    FB_ERR_DATA = 3,             /* unreadable, malformed or mismatched input */
    FB_ERR_MODEL = 4             /* converter constraint or numerical failure */
} fb_status;

typedef struct fb_dataset fb_dataset;
typedef struct fb_model fb_model;

FB_API const char* fb_version(void);
FB_API const char* fb_last_error(void);
FB_API void fb_string_free(char* s);

/* ---- datasets ---- */

FB_API fb_status fb_dataset_load_csv(const char* path, fb_dataset** out);
/* inputs is row-major n x dim. */
FB_API fb_status fb_dataset_from_arrays(size_t n, size_t dim, const double* inputs, const double* targets,
                                        fb_dataset** out);
/* spec: key=value lines (generator, n, noise_sd, seed, layout, ranges). */
FB_API fb_status fb_dataset_generate(const char* spec, fb_dataset** out);
FB_API fb_status fb_dataset_save_csv(const fb_dataset* data, const char* path);
FB_API fb_status fb_dataset_to_csv(const fb_dataset* data, char** out);
FB_API size_t fb_dataset_size(const fb_dataset* data);
FB_API size_t fb_dataset_dim(const fb_dataset* data);
FB_API fb_status fb_dataset_split(const fb_dataset* data, double test_fraction, uint64_t seed, fb_dataset** train,
                                  fb_dataset** test);
FB_API void fb_dataset_free(fb_dataset* data);

/* ---- models ---- */

FB_API fb_status fb_model_load(const char* path, fb_model** out);
FB_API fb_status fb_model_from_json(const char* json, fb_model** out);
FB_API fb_status fb_model_save(const fb_model* model, const char* path);
FB_API fb_status fb_model_to_json(const fb_model* model, char** out);
/* "tsk", "rbfn", "moe", "tree", "fuzzy_tree" or "stack"; static storage. */
FB_API const char* fb_model_kind(const fb_model* model);
FB_API size_t fb_model_input_dim(const fb_model* model);
FB_API fb_status fb_model_predict(const fb_model* model, const double* x, size_t dim, double* y);
/* out receives fb_dataset_size(data) predictions. */
FB_API fb_status fb_model_predict_dataset(const fb_model* model, const fb_dataset* data, double* out);
FB_API fb_status fb_model_mse(const fb_model* model, const fb_dataset* data, double* mse);
/* target: "tsk", "rbfn", "generalized-rbfn" or "moe". */
FB_API fb_status fb_model_convert(const fb_model* model, const char* target, fb_model** out);
/* One line per rule, each terminated by '\n'. */
FB_API fb_status fb_model_describe(const fb_model* model, char** out);
FB_API void fb_model_free(fb_model* model);

/* ---- training and verification ---- */

/* method: anfis, moe, cart, fuzzy-cart, stack, nozaki or local-rules.
 * test and options_json may be NULL; metrics_json and history_jsonl may be
 * NULL when not wanted. history_jsonl is empty for methods without epochs. */
FB_API fb_status fb_train(const char* method, const fb_dataset* train, const fb_dataset* test,
                          const char* options_json, fb_model** model, char** metrics_json, char** history_jsonl);

/* suite: equivalence, gradients or oracles. options_json keys: trials, tol,
 * seed, points. With a model the checks target it, otherwise random fixtures;
 * data, when given, supplies the input box and the gradient sample.
 * *passed is set to 1 when every check is within tolerance. report_text may
 * be NULL. */
FB_API fb_status fb_verify(const char* suite, const char* options_json, const fb_model* model,
                           const fb_dataset* data, char** report_json, char** report_text, int* passed);

#ifdef __cplusplus
}
#endif

#endif
