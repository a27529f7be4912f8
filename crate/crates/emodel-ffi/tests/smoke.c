#include <stdio.h>
#include <string.h>

#include "emodel.h"

int main(void) {
    EmodelConfig *cfg = NULL;
    if (emodel_config_parse("command = appendix\nsamples = 5\n", &cfg) != EMODEL_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", emodel_last_error());
        return 1;
    }
    EmodelReport *report = NULL;
    if (emodel_run(cfg, &report) != EMODEL_STATUS_OK) {
        fprintf(stderr, "run: %s\n", emodel_last_error());
        return 1;
    }
    int code = emodel_report_exit_code(report);
    const char *json = emodel_report_json(report);
    int ok = code == 0 && strstr(json, "\"appendix\"") != NULL;
    if (emodel_config_set(cfg, "N", "zero") != EMODEL_STATUS_INVALID_CONFIG) ok = 0;
    emodel_report_free(report);
    emodel_config_free(cfg);
    printf("%s\n", ok ? "ok" : "failed");
    return ok ? 0 : 1;
}
