/* generated by tools/gen_fixtures.sh from fact.c with SMALL and DEBUG defined */
int fa[10000];
int fa_modulo;
int count;

int main(int argc, char **argv) {
    fact(10);
    return 0;
}

void fact(int n) {
    int i;
    init_fa();
    fa_modulo = 1;
    for (i = 4; i != 0; i--) {
        fa_modulo *= 10;
    }
    for (i = n - 1; i != 0; i--) {
        mult_fa((n + 1) - i);
    }
    print_fa();
}

void mult_fa(int k) {
    register int __local_count = count;
    register int __local_fa_modulo = fa_modulo;
    register int *__local_fa = fa;
    register int i = 0;
    int carry = 0;
    int product = 0;
    do {
        product = (__local_fa[i] * k) + carry;
        __local_fa[i] = product % __local_fa_modulo;
        carry = product / __local_fa_modulo;
        i++;
    } while ((i <= __local_count) | (carry > 0));
    __local_count = i - 1;
    count = __local_count;
}

void init_fa() {
    register int *__local_fa = fa;
    unsigned int i;
    memset(__local_fa + 1, 0, 9999 * sizeof(int));
    __local_fa[0] = 1;
}

void print_fa() {
    register int __local_count = count;
    register int *__local_fa = fa;
    char str[10] = "";
    int i;
    printf("%0d", __local_fa[__local_count--]);
    while (__local_count >= 0) {
        sprintf(str, "%0d", __local_fa[__local_count]);
        for (i = 4; i > strlen(str); i--) {
            putchar('0');
        }
        printf("%0d", __local_fa[__local_count]);
        fflush(stdout);
        __local_count--;
    }
    printf("\n");
    count = __local_count;
}
