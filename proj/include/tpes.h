/* tpes.h - C API of the typical-period energy system design library.
 *
 * All functions return a tpes_status (0 on success); on failure a
 * human-readable message is available from tpes_last_error() until the next
 * call on the same thread. Objects are opaque handles freed with their
 * matching _free function. Strings returned through char** are owned by the
 * caller and released with tpes_string_free().
 */
#ifndef TPES_H
#define TPES_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tpes_status {
    TPES_OK = 0,
    TPES_ERR_INPUT = 2,      /* bad config, bad data, validation failure */
    TPES_ERR_INFEASIBLE = 3, /* model infeasible or unbounded */
    TPES_ERR_SOLVER = 4,     /* solver gave up or misbehaved */
} tpes_status;

typedef struct tpes_profiles tpes_profiles;
typedef struct tpes_typical tpes_typical;
typedef struct tpes_system tpes_system;

const char* tpes_version(void);
const char* tpes_last_error(void);
void tpes_string_free(char* s);

/* ---- profiles ---------------------------------------------------------- */

/* CSV with a header row; one profile per requested column name. */
tpes_status tpes_profiles_read_csv(const char* path, const char* const* names, int n_names, tpes_profiles** out);

/* Synthetic profiles from a JSON recipe:
 * {"length": 8760, "step_hours": 1.0,
 *  "profiles": {"pv": {"kind": "seasonal_sine", ...}, ...}}            */
tpes_status tpes_profiles_synth(const char* recipe_json, uint64_t seed, tpes_profiles** out);

int tpes_profiles_count(const tpes_profiles* p);
long tpes_profiles_length(const tpes_profiles* p);
tpes_status tpes_profiles_values(const tpes_profiles* p, const char* name, double* buffer, long buffer_len);
void tpes_profiles_free(tpes_profiles* p);

/* ---- aggregation ------------------------------------------------------- */

/* k-medoids over candidate periods; mode is "pam" or "exact". */
tpes_status tpes_aggregate(const tpes_profiles* profiles, int steps_per_period, int n_typical, const char* mode,
                           tpes_typical** out);

int tpes_typical_count(const tpes_typical* t);
tpes_status tpes_typical_to_json(const tpes_typical* t, const tpes_profiles* profiles, char** json_out);
tpes_status tpes_typical_representation_error(const tpes_typical* t, const tpes_profiles* profiles, double* out);
void tpes_typical_free(tpes_typical* t);

/* ---- energy system ----------------------------------------------------- */

tpes_status tpes_system_load_file(const char* path, tpes_system** out);
tpes_status tpes_system_load_json(const char* json_text, tpes_system** out);
/* JSON report; status is TPES_OK even when defects are found. */
tpes_status tpes_system_validate(const tpes_system* s, char** report_json);
void tpes_system_free(tpes_system* s);

/* capital recovery factor; NaN on invalid input */
double tpes_crf(double wacc, double lifetime_years);

/* ---- commands ---------------------------------------------------------- */

/* Each command takes one JSON config document (see README) and returns a
 * JSON result; output files land in a run-stamped directory under out_dir.
 * The returned status matches the CLI exit code. */
tpes_status tpes_cmd_aggregate(const char* config_json, char** result_json);
tpes_status tpes_cmd_solve(const char* config_json, char** result_json);
tpes_status tpes_cmd_sweep(const char* config_json, char** result_json);
tpes_status tpes_cmd_validate(const char* config_json, char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* TPES_H */
