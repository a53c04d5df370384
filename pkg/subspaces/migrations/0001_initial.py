# Generated by Django 5.2.4 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='PipelineRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created', models.DateTimeField(auto_now_add=True)),
                ('distance_kind', models.CharField(choices=[('grassmann', 'Grassmann'), ('ellipsoid', 'Ellipsoid'), ('asimov', 'Asimov'), ('projection', 'Projection'), ('chordal', 'Chordal')], max_length=20)),
                ('input_model', models.CharField(choices=[('blackbox', 'Blackbox'), ('memory', 'Memory')], max_length=20)),
                ('evolution_mode', models.CharField(choices=[('exact', 'Exact'), ('jacobi_anger', 'Jacobi-Anger')], max_length=20)),
                ('qpe_bits', models.PositiveSmallIntegerField(help_text='Phase register size in bits')),
                ('shots', models.PositiveIntegerField(blank=True, default=None, help_text='Empty for exact sampling', null=True)),
                ('seed', models.IntegerField()),
                ('m_path', models.CharField(blank=True, default=None, help_text='Matrix file for M', max_length=500, null=True)),
                ('n_path', models.CharField(blank=True, default=None, help_text='Matrix file for N', max_length=500, null=True)),
                ('n', models.PositiveIntegerField(help_text='Ambient dimension')),
                ('k', models.PositiveIntegerField(help_text='Subspace dimension (n for ellipsoid runs)')),
                ('classical_value', models.FloatField()),
                ('quantum_estimate', models.FloatField()),
                ('abs_error', models.FloatField()),
                ('exact_p0', models.FloatField(blank=True, default=None, null=True)),
                ('sampled_p0', models.FloatField(blank=True, default=None, null=True)),
                ('epsilon_p', models.FloatField(blank=True, default=None, null=True)),
                ('leaked_mass', models.FloatField(blank=True, default=None, null=True)),
                ('alpha_total', models.FloatField(blank=True, default=None, null=True)),
                ('report', models.TextField(help_text='Full report document')),
            ],
            options={
                'db_table': 'pipelineRunTable',
                'ordering': ['-created'],
            },
        ),
    ]
