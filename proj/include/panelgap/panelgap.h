/* C interface to the panelgap estimation library.
 *
 * Commands are described by a JSON config string and return a JSON result
 * string of the form {"files": {...}, "warnings": [...]}; "files" maps output
 * filenames to report objects (or CSV text). Strings returned through
 * `result` are owned by the caller and released with pg_free_string().
 */
#ifndef PANELGAP_H
#define PANELGAP_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    PG_OK = 0,
    PG_ERR_PARSE = 1,        /* malformed config JSON */
    PG_ERR_INVALID = 2,      /* bad data or arguments */
    PG_ERR_NONCONVERGED = 3, /* solver hit its iteration cap; result still set */
    PG_ERR_INTERNAL = 4
} pg_status;

/* Runs one command (estimate | placebo | sdid | cv | simulate). On PG_OK and
 * PG_ERR_NONCONVERGED, *result holds the serialized bundle. */
pg_status pg_run(const char* config_json, char** result);

/* Message for the most recent failure on this thread; empty string if none. */
const char* pg_last_error(void);

void pg_free_string(char* s);

const char* pg_version(void);

#ifdef __cplusplus
}
#endif

#endif /* PANELGAP_H */
