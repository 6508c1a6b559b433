/* ptcov - nonparametric covariate testing for spatial point patterns.
 *
 * C interface to the shared library. All functions return a status code;
 * on failure a thread-local message is available via ptcov_last_error().
 * Objects returned through out-parameters are owned by the caller and must
 * be released with the matching *_free function.
 */
#ifndef PTCOV_H
#define PTCOV_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  PTCOV_OK = 0,
  PTCOV_ERR_ARGUMENT = 1, /* invalid parameters or config */
  PTCOV_ERR_IO = 2,       /* file system problems */
  PTCOV_ERR_DATA = 3,     /* malformed or inconsistent input data */
  PTCOV_ERR_NUMERIC = 4,  /* estimation or solver failure */
  PTCOV_ERR_INTERNAL = 5
} ptcov_status;

const char* ptcov_version(void);

/* Message for the most recent failure on this thread. */
const char* ptcov_last_error(void);

/* ---- point patterns ---------------------------------------------------- */

typedef struct ptcov_pattern ptcov_pattern;

/* Reads a CSV file with header `x,y`. The window rectangle is
 * {x0, y0, x1, y1}; every point must lie inside it. */
ptcov_status ptcov_pattern_read_csv(const char* path, const double window_rect[4],
                                    ptcov_pattern** out);
ptcov_status ptcov_pattern_write_csv(const ptcov_pattern* pattern, const char* path);
long ptcov_pattern_size(const ptcov_pattern* pattern);
ptcov_status ptcov_pattern_point(const ptcov_pattern* pattern, long index, double* x, double* y);
void ptcov_pattern_free(ptcov_pattern* pattern);

/* ---- raster covariates ------------------------------------------------- */

typedef struct ptcov_field ptcov_field;

/* Esri ASCII grid IO. */
ptcov_status ptcov_field_read_asc(const char* path, ptcov_field** out);
ptcov_status ptcov_field_write_asc(const ptcov_field* field, const char* path);
/* Nearest-cell value at (x, y); fails for locations outside the window. */
ptcov_status ptcov_field_lookup(const ptcov_field* field, double x, double y, double* value);
/* Midpoint-rule integral over the field window. */
ptcov_status ptcov_field_integrate(const ptcov_field* field, double* value);
void ptcov_field_free(ptcov_field* field);

/* ---- statistics -------------------------------------------------------- */

/* Kendall correlation with pairwise-sign normalization; ties contribute 0. */
ptcov_status ptcov_kendall_tau(const double* a, const double* b, long n, double* out);

/* ---- commands ----------------------------------------------------------
 *
 * Runs one command (test | corr | select | simulate | replicate) from a JSON
 * run-config document, exactly as the CLI does. On success *report_json
 * receives the JSON report; release it with ptcov_string_free. */
ptcov_status ptcov_run_command(const char* command, const char* config_json, char** report_json);
void ptcov_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PTCOV_H */
