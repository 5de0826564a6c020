#include "header"
#ifdef SMALL
#define FACT_N 10
#else
#define FACT_N 2000
#endif
#define FA_SIZE 10000
/* number of array elements */
#define FA_DPE 4
/* 4 digits per array element */

int fa [FA_SIZE];
int fa_modulo; /* 10 ^ FA_DPE */
int count;
void fact(int n);
void print_fa();
void mult_fa(int n);
void init_fa();

int main(int argc, char **argv) {
    fact(FACT_N);
    /* Calculate factorial of FACT_N */
    return 0; }

/* init_fa() is called here; without it fa[0] stays 0 and every product is 0 */
void fact(int n) {
    int i;
    init_fa();
    fa_modulo = 1;
    for (i=1; i <= FA_DPE; i++)    fa_modulo *= 10;
    for (i=2; i <= n; i++)    mult_fa(i);
    #ifdef DEBUG
        print_fa();
    #endif
}
/* the loop condition closes a do-while; count is updated after it */
void mult_fa(int k)
{
register int i = 0; int carry = 0; int product = 0;
do {
product = fa [i] * k + carry;
fa[i] = product % fa_modulo ;
carry = product / fa_modulo;
i++;
}
while (i <= count || carry > 0);
count = i-1;
}
/* a byte-count memset((char *)fa+1, 0, FA_SIZE-1) would clear the wrong range;
   the element-sized form is memset(fa + 1, 0, (FA_SIZE - 1) * sizeof(int)) */
void init_fa(){
int i;
for (i=1; i<FA_SIZE; i++)    fa[i] = 0;
    fa[0] = 1;
}
void print_fa ()
{
char str[10] = "" ; int i;
printf("%0d", fa[count--]);
while (count >= 0)
{
sprintf (str, "%0d", fa[count]);
for (i=FA_DPE; i > strlen(str); i--)
putchar('0') ;
printf( "%0d", fa[count]);
fflush(stdout) ;
count--;
}
printf("\n") ;
}
