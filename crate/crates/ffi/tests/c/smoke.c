#include <stdio.h>
#include <string.h>

#include "harmonic_sieve.h"

#define CHECK(cond)                                                          \
  do {                                                                       \
    if (!(cond)) {                                                           \
      fprintf(stderr, "%s:%d: check failed: %s (%s)\n", __FILE__, __LINE__, \
              #cond, hsv_last_error_message());                              \
      return 1;                                                              \
    }                                                                        \
  } while (0)

int main(void) {
  HsvTable *table = NULL;
  CHECK(hsv_classical_sieve(1000000, &table) == HSV_STATUS_OK);

  uint64_t count = 0;
  CHECK(hsv_table_prime_count(table, 1000000, &count) == HSV_STATUS_OK);
  CHECK(count == 78498);

  HsvClass cls;
  CHECK(hsv_table_classify(table, 999983, &cls) == HSV_STATUS_OK);
  CHECK(cls == HSV_CLASS_SURVIVOR);

  HsvTriple t;
  CHECK(hsv_decompose_weak(table, 99, &t) == HSV_STATUS_OK);
  CHECK(t.p1 == 3 && t.p2 == 7 && t.p3 == 89);

  CHECK(hsv_decompose_weak(table, 98, &t) == HSV_STATUS_CONFIG);
  CHECK(strlen(hsv_last_error_message()) > 0);

  char *json = NULL;
  CHECK(hsv_verify_json(table, 9, 99, NULL, 0, 1, &json) == HSV_STATUS_OK);
  CHECK(strstr(json, "\"verified_count\": 46") != NULL);
  hsv_string_free(json);
  hsv_table_free(table);

  HsvTable *harmonic = NULL;
  CHECK(hsv_materialize(HSV_VARIANT_ODD_ONLY, HSV_SPAWN_RULE_CASE_I, 100, false,
                        &harmonic) == HSV_STATUS_OK);
  bool crossed = false;
  CHECK(hsv_zero_cross(HSV_VARIANT_ODD_ONLY, 3, 45, &crossed) == HSV_STATUS_OK);
  CHECK(crossed);
  hsv_table_free(harmonic);

  CHECK(hsv_compare_json(HSV_VARIANT_FULL, 100, true, &json) == HSV_STATUS_DIVERGENCE);
  hsv_string_free(json);

  printf("ok %s\n", hsv_version());
  return 0;
}
