#ifndef EMODEL_H
#define EMODEL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `EMODEL_STATUS_OK` is zero; everything else is a failure.
 */
typedef enum EmodelStatus {
  EMODEL_STATUS_OK = 0,
  EMODEL_STATUS_NULL_POINTER = 1,
  EMODEL_STATUS_INVALID_UTF8 = 2,
  EMODEL_STATUS_INVALID_CONFIG = 3,
  EMODEL_STATUS_PANIC = 4,
} EmodelStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct EmodelConfig EmodelConfig;

/**
 * Opaque result of [`emodel_run`].
 */
typedef struct EmodelReport EmodelReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success. Never null.
 */
const char *emodel_last_error(void);

/**
 * Library version as a static string.
 */
const char *emodel_version(void);

/**
 * A configuration with default settings and no command.
 */
struct EmodelConfig *emodel_config_new(void);

/**
 * Parses flat `key = value` text into a new configuration written to `*out`.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum EmodelStatus emodel_config_parse(const char *text, struct EmodelConfig **out);

/**
 * Sets one key, with the same names and syntax as the config file.
 *
 * # Safety
 * `config` must come from this library; `key` and `value` must be nul-terminated strings.
 */
enum EmodelStatus emodel_config_set(struct EmodelConfig *config,
                                    const char *key,
                                    const char *value);

/**
 * Serialised configuration; parses back to an equal configuration. Null on a null handle.
 *
 * # Safety
 * `config` must come from this library.
 */
const char *emodel_config_text(struct EmodelConfig *config);

/**
 * # Safety
 * `config` must come from this library and not be used afterwards. Null is ignored.
 */
void emodel_config_free(struct EmodelConfig *config);

/**
 * Validates and runs the experiment. A report is produced whenever the configuration is
 * valid, including for tolerance failures and numerical aborts; inspect
 * [`emodel_report_exit_code`]. Nothing is written to disk.
 *
 * # Safety
 * `config` must come from this library and `out` must be a valid pointer.
 */
enum EmodelStatus emodel_run(const struct EmodelConfig *config, struct EmodelReport **out);

/**
 * 0 pass, 2 tolerance failure, 3 numerical abort, 64 usage; -1 on a null handle.
 *
 * # Safety
 * `report` must come from this library.
 */
int32_t emodel_report_exit_code(const struct EmodelReport *report);

/**
 * JSON report with stable key order. Null on a null handle.
 *
 * # Safety
 * `report` must come from this library.
 */
const char *emodel_report_json(const struct EmodelReport *report);

/**
 * Trajectory CSV for `simulate` and `lax-check`, null otherwise.
 *
 * # Safety
 * `report` must come from this library.
 */
const char *emodel_report_csv(const struct EmodelReport *report);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards. Null is ignored.
 */
void emodel_report_free(struct EmodelReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EMODEL_H */
